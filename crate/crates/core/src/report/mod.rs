//! Configuration, the condition battery and report output.

mod battery;
mod config;
mod emit;

pub use battery::{
    run_battery, GridSummary, Header, MapSummary, Report, Section, Status, CURVATURE_PASS_TOLERANCE, GRID_CSV_FORMAT,
    REPORT_SCHEMA, ZEROS_CSV_FORMAT,
};
pub use config::{
    parse_zeros, parse_zeros_file, AnalysisConfig, DensityConfig, GridConfig, MapSpec, OutputConfig, CONFIG_SCHEMA,
    MAX_GRID_LEVEL, MIN_GRID_LEVEL, RADIUS_LIMIT,
};
pub use emit::{emit_grids, emit_report, grid_csv, report_json};
