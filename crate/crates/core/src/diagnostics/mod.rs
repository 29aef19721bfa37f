//! Numerical forms of the bounded-compression conditions and of the exact
//! identities they rest on.

mod boundary;
mod descent;
mod identities;
mod image;

pub use boundary::{
    holder_exponent, hyperbolic_area_function, quasigeodesic_fit, quasigeodesic_fit_capped, AreaFunctionSpec,
    HolderEstimate, QuasigeodesicFit, DEFAULT_C_CAP, S_GRID_STEP,
};
pub use descent::{
    center_defect, descent_chain, descent_search, starting_square, DescentChain, DescentWitness,
    RATIO_TIE_TOLERANCE,
};
pub use identities::{
    distortion_profile, gauss_curvature_residual, gauss_curvature_residual_with, jensen_balance,
    jensen_balance_with, DistortionEntry, JensenBalance, CURVATURE_CRITICAL_CLEARANCE,
};
pub use image::{
    ball_area, ball_containment_radius, image_area_sampled, image_area_with_multiplicity, image_diameter,
    max_hyperbolic_derivative, preimage_count, BallGrid, ContainmentResolution, MaxDerivative, QuadratureSpec,
    SampledArea, TargetGrid, PROXIMITY_THRESHOLD,
};
