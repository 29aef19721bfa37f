//! The full condition battery.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{AnalysisConfig, CONFIG_SCHEMA};
use crate::blaschke::{BlaschkeProduct, CriticalSet};
use crate::carleson::{
    carleson_constant_with_witness, is_heavy_square, light_subsquare_search, occupied_squares, zero_measure, DyadicSquare,
    HEAVY_CONSTANT,
};
use crate::clark::{clark_measure, gradient_identity_with, is_heavy_arc, light_subarc_search, Arc};
use crate::density::{default_r_ladder, quasi_separation_count, separation_constant, uniform_upper_density};
use crate::diagnostics::{
    ball_area, ball_containment_radius, descent_chain, descent_search, distortion_profile, gauss_curvature_residual_with,
    holder_exponent, hyperbolic_area_function, image_area_sampled, image_area_with_multiplicity, image_diameter,
    jensen_balance_with, max_hyperbolic_derivative, quasigeodesic_fit, AreaFunctionSpec, CURVATURE_CRITICAL_CLEARANCE,
};
use crate::error::{Error, Result};
use crate::geometry::{distance_to_rho, BoundaryPoint, DiskPoint, Mobius};
use crate::grid::{dyadic_centers, GridPoint};

pub const REPORT_SCHEMA: &str = "bc-report/1";
pub const GRID_CSV_FORMAT: &str = "bc-grid-csv/1";
pub const ZEROS_CSV_FORMAT: &str = "bc-zeros-csv/1";

/// A curvature check passes when the residual at the finer step, in
/// hyperbolic units, stays below this.
pub const CURVATURE_PASS_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Operations behind the statistics, with their parameters.
    pub calls: Vec<Value>,
    pub statistics: Value,
    pub witnesses: Value,
    pub notes: Vec<String>,
}

impl Section {
    fn new(title: &str) -> Self {
        Section {
            title: title.to_string(),
            status: Status::Ok,
            reason: None,
            calls: Vec::new(),
            statistics: json!({}),
            witnesses: json!({}),
            notes: Vec::new(),
        }
    }

    fn skipped(title: &str, reason: impl Into<String>) -> Self {
        Section { status: Status::Skipped, reason: Some(reason.into()), ..Section::new(title) }
    }

    fn failed(title: &str, error: &Error) -> Self {
        Section { status: Status::Failed, reason: Some(error.to_string()), ..Section::new(title) }
    }

    fn call(mut self, op: &str, params: Value) -> Self {
        self.calls.push(json!({ "op": op, "params": params }));
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Marks the section failed when some evaluations failed, keeping the
    /// partial statistics.
    fn absorb_errors(mut self, errors: &[(String, String)]) -> Self {
        if let Some((key, message)) = errors.first() {
            self.status = Status::Failed;
            self.reason = Some(format!("{} evaluation(s) failed; first at {key}: {message}", errors.len()));
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub degree: usize,
    pub zeros: Vec<DiskPoint>,
    pub prefactor_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub kind: String,
    pub levels: [u32; 2],
    pub coarse_levels: [u32; 2],
    pub r_max: f64,
    pub points: usize,
    pub coarse_points: usize,
    pub squares: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub formats: BTreeMap<String, String>,
    pub tool_version: String,
    pub seed: u64,
    pub map: MapSummary,
    pub grid: GridSummary,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    /// Keyed by condition label: `1`, `1a`…`1f`, `2`, `3`, `4`, `5a`…`5c`, `6.*`.
    pub sections: BTreeMap<String, Section>,
    /// Raw `key,value` grids behind the statistics.
    pub grids: BTreeMap<String, Vec<(String, f64)>>,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        self.sections.values().any(|s| s.status == Status::Failed)
    }

    pub fn failed_sections(&self) -> Vec<&str> {
        self.sections
            .iter()
            .filter(|(_, s)| s.status == Status::Failed)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// A statistic by section label and JSON pointer, e.g. `("1", "/min")`.
    pub fn statistic(&self, section: &str, pointer: &str) -> Option<&Value> {
        self.sections.get(section)?.statistics.pointer(pointer)
    }
}

fn point_json(z: DiskPoint) -> Value {
    json!([z.value().re, z.value().im])
}

/// Results of a parallel sweep over keyed items.
struct Sweep {
    rows: Vec<(String, f64)>,
    errors: Vec<(String, String)>,
}

impl Sweep {
    fn run<T: Sync>(items: &[T], key: impl Fn(&T) -> String + Sync, eval: impl Fn(&T) -> Result<f64> + Sync) -> Sweep {
        let results: Vec<(String, Result<f64>)> = items.par_iter().map(|it| (key(it), eval(it))).collect();
        let mut sweep = Sweep { rows: Vec::new(), errors: Vec::new() };
        for (k, r) in results {
            match r {
                Ok(v) => sweep.rows.push((k, v)),
                Err(e) => sweep.errors.push((k, e.to_string())),
            }
        }
        sweep
    }

    fn extreme(&self, largest: bool) -> Option<&(String, f64)> {
        let mut best: Option<&(String, f64)> = None;
        for row in &self.rows {
            let better = match best {
                None => true,
                Some(b) => (largest && row.1 > b.1) || (!largest && row.1 < b.1),
            };
            if better {
                best = Some(row);
            }
        }
        best
    }

    fn summary(&self, largest: bool, points: &BTreeMap<String, DiskPoint>) -> (Value, Value) {
        let (name, arg) = if largest { ("max", "argmax") } else { ("min", "argmin") };
        match self.extreme(largest) {
            Some((k, v)) => (
                json!({ name: v, "points": self.rows.len(), "errors": self.errors.len() }),
                json!({ arg: { "key": k, "z": points.get(k).map(|p| point_json(*p)) } }),
            ),
            None => (json!({ name: null, "points": 0, "errors": self.errors.len() }), json!({})),
        }
    }
}

struct Context<'a> {
    config: &'a AnalysisConfig,
    f: BlaschkeProduct,
    grid: Vec<GridPoint>,
    coarse: Vec<GridPoint>,
    squares: Vec<DyadicSquare>,
    lookup: BTreeMap<String, DiskPoint>,
    crit: Result<CriticalSet>,
}

/// Runs every in-scope diagnostic over the configured grid. Failures are
/// recorded per section; only invalid configurations are errors.
pub fn run_battery(config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let f = config.blaschke()?;
    let g = &config.grid;
    let within = |p: &GridPoint| p.point.abs() <= g.r_max;
    let grid: Vec<GridPoint> = dyadic_centers(g.base_level, g.max_level, true)?.into_iter().filter(within).collect();
    let coarse_top = g.coarse_level.min(g.max_level);
    let coarse: Vec<GridPoint> = grid
        .iter()
        .filter(|p| p.key == "origin" || p.key[1..].split(':').next().and_then(|l| l.parse::<u32>().ok()).is_some_and(|l| l <= coarse_top))
        .cloned()
        .collect();
    let squares: Vec<DyadicSquare> = (g.base_level..=g.max_level)
        .flat_map(DyadicSquare::level_squares)
        .filter(|q| q.center().abs() <= g.r_max)
        .collect();
    let lookup = grid.iter().map(|p| (p.key.clone(), p.point)).collect();
    let crit = f.critical_points();
    let ctx = Context { config, f, grid, coarse, squares, lookup, crit };

    let mut sections = BTreeMap::new();
    let mut grids = BTreeMap::new();
    let dh: Vec<(String, f64)> = ctx.grid.iter().map(|p| (p.key.clone(), ctx.f.hyperbolic_derivative(p.point))).collect();
    grids.insert("hyperbolic_derivative".to_string(), dh);

    let (diameter, rows) = section_diameter(&ctx);
    grids.insert("diameter".into(), rows);
    let mut same = diameter.clone();
    same.title = "Hyperbolic diameter of images of balls (restated condition)".into();
    same.notes.push("identical statistic to condition 1".into());
    sections.insert("1".to_string(), diameter);
    sections.insert("1a".to_string(), same);

    let (s, rows) = section_area_sampled(&ctx);
    grids.insert("area_sampled".into(), rows);
    sections.insert("1b".into(), s);
    let (s, rows) = section_area_multiplicity(&ctx);
    grids.insert("area_multiplicity".into(), rows);
    sections.insert("1c".into(), s);
    let (s, rows) = section_max_derivative(&ctx);
    grids.insert("max_derivative".into(), rows);
    sections.insert("1d".into(), s);
    let (s, rows) = section_containment(&ctx);
    grids.insert("containment".into(), rows);
    sections.insert("1e".into(), s);
    sections.insert("1f".into(), section_distortion(&ctx));

    let (s, descent_grids) = section_descent(&ctx);
    grids.extend(descent_grids);
    sections.insert("2".into(), s);
    let (s, rows) = section_quasigeodesic(&ctx);
    grids.insert("quasigeodesic_s".into(), rows);
    sections.insert("3".into(), s);
    sections.insert("4".into(), section_clark(&ctx));

    sections.insert("5a".into(), section_blaschke(&ctx));
    sections.insert("5b".into(), section_carleson(&ctx));
    sections.insert("5c".into(), section_light_squares(&ctx));

    sections.insert("6.critical_set".into(), section_critical_set(&ctx));
    sections.insert("6.quasi_separation".into(), section_quasi_separation(&ctx));
    sections.insert("6.density".into(), section_density(&ctx));
    let (s, rows) = section_curvature(&ctx);
    grids.insert("curvature_residual".into(), rows);
    sections.insert("6.gce_residual".into(), s);
    sections.insert("6.jensen".into(), section_jensen(&ctx));
    sections.insert(
        "6.maximality".into(),
        Section::skipped("Maximality of the Blaschke product", "maximality is not decidable from finitely many evaluations"),
    );
    let consistency = section_consistency(&grids, config.grid.radius);
    sections.insert("consistency".into(), consistency);

    let formats = BTreeMap::from([
        ("config".to_string(), CONFIG_SCHEMA.to_string()),
        ("grid_csv".to_string(), GRID_CSV_FORMAT.to_string()),
        ("report".to_string(), REPORT_SCHEMA.to_string()),
        ("zeros_csv".to_string(), ZEROS_CSV_FORMAT.to_string()),
    ]);
    let header = Header {
        schema: REPORT_SCHEMA.to_string(),
        formats,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        map: MapSummary {
            degree: ctx.f.degree(),
            zeros: ctx.f.zeros().to_vec(),
            prefactor_angle: ctx.f.prefactor_angle(),
        },
        grid: GridSummary {
            kind: "dyadic centers and origin".into(),
            levels: [g.base_level, g.max_level],
            coarse_levels: [g.base_level, coarse_top],
            r_max: g.r_max,
            points: ctx.grid.len(),
            coarse_points: ctx.coarse.len(),
            squares: ctx.squares.len(),
            radius: g.radius,
        },
        // output locations do not affect the numbers
        config: AnalysisConfig { output: Default::default(), ..config.clone() },
    };
    Ok(Report { header, sections, grids })
}

const DYADIC_NOTE: &str = "searched over dyadic squares only; constants for arbitrary squares differ by a bounded factor";
const GRID_NOTE: &str = "minimum over the stored grid up to r_max; no extrapolation to the whole disk";

fn section_diameter(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let sweep = Sweep::run(&ctx.grid, |p| p.key.clone(), |p| image_diameter(&ctx.f, p.point, g.radius, g.boundary_samples));
    let (stats, wit) = sweep.summary(false, &ctx.lookup);
    let mut s = Section::new("Bounded compression: diam_h F(B_h(z, R))")
        .call("image_diameter", json!({ "radius": g.radius, "n_boundary": g.boundary_samples, "grid": "full" }))
        .note(GRID_NOTE);
    s.statistics = stats;
    s.witnesses = wit;
    (s.absorb_errors(&sweep.errors), sweep.rows)
}

fn section_area_sampled(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let results: Vec<(String, Result<(f64, bool)>)> = ctx
        .coarse
        .par_iter()
        .map(|p| (p.key.clone(), image_area_sampled(&ctx.f, p.point, g.radius, &g.target_grid).map(|a| (a.area, a.degenerate))))
        .collect();
    let mut sweep = Sweep { rows: Vec::new(), errors: Vec::new() };
    let mut degenerate = 0;
    for (k, r) in results {
        match r {
            Ok((a, d)) => {
                degenerate += usize::from(d);
                sweep.rows.push((k, a));
            }
            Err(e) => sweep.errors.push((k, e.to_string())),
        }
    }
    let (mut stats, wit) = sweep.summary(false, &ctx.lookup);
    stats["degenerate"] = json!(degenerate);
    let mut s = Section::new("Hyperbolic area of F(B_h(z, R))")
        .call("image_area_sampled", json!({ "radius": g.radius, "target_grid": g.target_grid, "grid": "coarse" }))
        .note(GRID_NOTE)
        .note("evaluated on the coarse grid; target cells classified by winding number at their centers");
    s.statistics = stats;
    s.witnesses = wit;
    (s.absorb_errors(&sweep.errors), sweep.rows)
}

fn section_area_multiplicity(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let sweep = Sweep::run(&ctx.coarse, |p| p.key.clone(), |p| image_area_with_multiplicity(&ctx.f, p.point, g.radius, &g.quadrature));
    let (mut stats, wit) = sweep.summary(false, &ctx.lookup);
    stats["ball_area"] = json!(ball_area(g.radius));
    let mut s = Section::new("Hyperbolic area with multiplicity")
        .call("image_area_with_multiplicity", json!({ "radius": g.radius, "quadrature": g.quadrature, "grid": "coarse" }))
        .note(GRID_NOTE)
        .note("evaluated on the coarse grid");
    s.statistics = stats;
    s.witnesses = wit;
    (s.absorb_errors(&sweep.errors), sweep.rows)
}

fn section_max_derivative(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let sweep = Sweep::run(&ctx.grid, |p| p.key.clone(), |p| {
        max_hyperbolic_derivative(&ctx.f, p.point, g.radius, &g.ball_grid).map(|m| m.value)
    });
    let (stats, wit) = sweep.summary(false, &ctx.lookup);
    let mut s = Section::new("Hyperbolic derivative: max over B_h(z, R)")
        .call("max_hyperbolic_derivative", json!({ "radius": g.radius, "ball_grid": g.ball_grid, "grid": "full" }))
        .note(GRID_NOTE);
    s.statistics = stats;
    s.witnesses = wit;
    (s.absorb_errors(&sweep.errors), sweep.rows)
}

fn section_containment(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let sweep = Sweep::run(&ctx.coarse, |p| p.key.clone(), |p| {
        ball_containment_radius(&ctx.f, p.point, g.radius, &g.containment)
    });
    let (stats, wit) = sweep.summary(false, &ctx.lookup);
    let mut s = Section::new("Images of balls: F(B_h(z, R)) ⊃ B_h(F(z), c)")
        .call("ball_containment_radius", json!({ "radius": g.radius, "resolution": g.containment, "grid": "coarse" }))
        .note(GRID_NOTE)
        .note("evaluated on the coarse grid; c is resolved to the bisection ladder");
    s.statistics = stats;
    s.witnesses = wit;
    (s.absorb_errors(&sweep.errors), sweep.rows)
}

fn section_distortion(ctx: &Context) -> Section {
    let title = "Distortion away from the critical set";
    let crit = match &ctx.crit {
        Ok(c) => c,
        Err(e) => return Section::failed(title, e),
    };
    let profile = distortion_profile(&ctx.f, crit, &ctx.config.distortion_eps, &ctx.grid, ctx.config.grid.r_max);
    let qs = quasi_separation_count(&crit.points, 1.0);
    let mut s = Section::new(title)
        .call("distortion_profile", json!({ "eps": ctx.config.distortion_eps, "r_max": ctx.config.grid.r_max, "grid": "full" }))
        .call("quasi_separation_count", json!({ "radius": 1.0 }))
        .note(GRID_NOTE);
    s.statistics = json!({
        "profile": profile.iter().map(|e| json!({ "eps": e.eps, "delta": e.delta, "points": e.points })).collect::<Vec<_>>(),
        "quasi_separation": qs.as_ref().ok(),
    });
    s.witnesses = json!(profile.iter().map(|e| e.witness.map(point_json)).collect::<Vec<_>>());
    match qs {
        Ok(_) => s,
        Err(e) => Section::failed(title, &e),
    }
}

fn eps_label(eps: f64) -> String {
    format!("eps_{eps}")
}

fn section_descent(ctx: &Context) -> (Section, BTreeMap<String, Vec<(String, f64)>>) {
    let depth = ctx.config.grid.search_depth;
    let mut grids = BTreeMap::new();
    let mut per_eps = Vec::new();
    let mut witnesses = Vec::new();
    let mut errors = Vec::new();
    for &eps in &ctx.config.eps_ladder {
        let found: Vec<(DyadicSquare, Result<Option<_>>)> =
            ctx.squares.par_iter().map(|q| (*q, descent_search(&ctx.f, *q, eps, depth))).collect();
        let mut rows = Vec::new();
        let mut missing = Vec::new();
        let mut worst: Option<(u32, DyadicSquare, f64)> = None;
        for (q, r) in found {
            match r {
                Ok(Some(w)) => {
                    rows.push((q.key(), w.ratio));
                    if worst.is_none_or(|(n, _, _)| w.depth > n) {
                        worst = Some((w.depth, q, w.ratio));
                    }
                }
                Ok(None) => missing.push(q.key()),
                Err(e) => errors.push((q.key(), e.to_string())),
            }
        }
        per_eps.push(json!({
            "eps": eps,
            "n_eps": worst.map(|w| w.0),
            "squares": ctx.squares.len(),
            "not_found": missing.len(),
        }));
        witnesses.push(json!({
            "eps": eps,
            "deepest": worst.map(|(n, q, r)| json!({ "square": q.key(), "depth": n, "ratio": r })),
            "not_found": missing.iter().take(16).collect::<Vec<_>>(),
        }));
        grids.insert(format!("descent_ratio_{}", eps_label(eps)), rows);
    }
    let chain = descent_chain(&ctx.f, DiskPoint::origin(), 0.5, 8, depth);
    let mut s = Section::new("Hyperbolic descent")
        .call("descent_search", json!({ "eps": ctx.config.eps_ladder, "max_depth": depth, "squares": "dyadic, center within r_max" }))
        .call("descent_chain", json!({ "z": [0.0, 0.0], "eps": 0.5, "chain_length": 8, "max_depth": depth }))
        .note(DYADIC_NOTE)
        .note("n_eps is the largest minimal relative depth over the searched squares");
    s.statistics = json!({
        "per_eps": per_eps,
        "chain_from_origin": chain.as_ref().ok().map(|c| json!({
            "complete": c.complete,
            "xi": c.xi.angle(),
            "squares": c.squares.iter().map(|q| q.key()).collect::<Vec<_>>(),
        })),
    });
    s.witnesses = json!(witnesses);
    if let Err(e) = &chain {
        errors.push(("chain".into(), e.to_string()));
    }
    (s.absorb_errors(&errors), grids)
}

fn section_quasigeodesic(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let g = &ctx.config.grid;
    let fits: Vec<(String, Result<(f64, f64, f64, bool)>)> = ctx
        .coarse
        .par_iter()
        .map(|p| {
            let r = descent_chain(&ctx.f, p.point, 0.5, 6, g.search_depth).and_then(|chain| {
                let fit = quasigeodesic_fit(&ctx.f, p.point, chain.xi, g.ray_length, g.ray_samples)?;
                Ok((fit.s, fit.c, chain.xi.angle(), chain.complete))
            });
            (p.key.clone(), r)
        })
        .collect();
    let mut s_rows = Vec::new();
    let mut errors = Vec::new();
    let mut worst_s: Option<(String, f64)> = None;
    let mut worst_c: Option<(String, f64)> = None;
    let mut incomplete = 0;
    for (k, r) in fits {
        match r {
            Ok((sv, c, _, complete)) => {
                incomplete += usize::from(!complete);
                if worst_s.as_ref().is_none_or(|w| sv < w.1) {
                    worst_s = Some((k.clone(), sv));
                }
                if worst_c.as_ref().is_none_or(|w| c > w.1) {
                    worst_c = Some((k.clone(), c));
                }
                s_rows.push((k, sv));
            }
            Err(e) => errors.push((k, e.to_string())),
        }
    }
    // boundary behaviour along the ray chosen from the origin
    let xi = descent_chain(&ctx.f, DiskPoint::origin(), 0.5, 8, g.search_depth)
        .map(|c| c.xi)
        .unwrap_or_else(|_| BoundaryPoint::new(0.0));
    let ladder: Vec<f64> = (1..=24).map(|k| 1.0 - (-(k as f64)).exp2()).collect();
    let holder = holder_exponent(&ctx.f, xi, &ladder);
    let spec = AreaFunctionSpec::default();
    let area_radii = [0.9, 0.99, 0.999];
    let area: Vec<Result<f64>> = area_radii
        .iter()
        .map(|&r| hyperbolic_area_function(&ctx.f, xi.angle(), r, 2.0, &spec))
        .collect();
    if let Err(e) = &holder {
        errors.push(("holder".into(), e.to_string()));
    }
    for (r, a) in area_radii.iter().zip(&area) {
        if let Err(e) = a {
            errors.push((format!("area_function r={r}"), e.to_string()));
        }
    }
    let mut s = Section::new("Quasigeodesic rays")
        .call("descent_chain", json!({ "eps": 0.5, "chain_length": 6, "max_depth": g.search_depth, "grid": "coarse" }))
        .call("quasigeodesic_fit", json!({ "t_max": g.ray_length, "n_samples": g.ray_samples, "c_cap": crate::diagnostics::DEFAULT_C_CAP }))
        .call("holder_exponent", json!({ "xi": xi.angle(), "r_ladder": "1 - 2^-k, k = 1..24" }))
        .call("hyperbolic_area_function", json!({ "theta": xi.angle(), "r": area_radii, "aperture": 2.0 }))
        .note("each ray ends at the limit point of a descent chain with ε = 1/2 started at z")
        .note(GRID_NOTE);
    s.statistics = json!({
        "s_min": worst_s.as_ref().map(|w| w.1),
        "c_max": worst_c.as_ref().map(|w| w.1),
        "rays": s_rows.len(),
        "incomplete_chains": incomplete,
        "holder_exponent": holder.as_ref().ok().map(|h| h.s),
        "area_function": area_radii.iter().zip(&area).map(|(r, a)| json!({ "r": r, "value": a.as_ref().ok() })).collect::<Vec<_>>(),
    });
    s.witnesses = json!({
        "s_min_at": worst_s.map(|w| w.0),
        "c_max_at": worst_c.map(|w| w.0),
        "holder_direction": xi.angle(),
        "holder_table": holder.ok().map(|h| h.table),
    });
    (s.absorb_errors(&errors), s_rows)
}

fn dyadic_arcs(base: u32, max: u32) -> Vec<Arc> {
    let mut out = Vec::new();
    for level in base..=max {
        let n = 1u64 << level;
        let len = (-(level as f64)).exp2();
        for j in 0..n {
            out.push(Arc::new(TAU * (j as f64 + 0.5) / n as f64, len).expect("dyadic arc length lies in (0, 1]"));
        }
    }
    out
}

fn section_clark(ctx: &Context) -> Section {
    let g = &ctx.config.grid;
    let arcs = dyadic_arcs(g.base_level, g.max_level);
    let delta_min = (-(g.search_depth as f64)).exp2();
    let mut per_alpha = Vec::new();
    let mut errors = Vec::new();
    for &alpha in &ctx.config.alphas {
        let mu = match clark_measure(&ctx.f, BoundaryPoint::new(alpha)) {
            Ok(m) => m,
            Err(e) => {
                errors.push((format!("alpha={alpha}"), e.to_string()));
                continue;
            }
        };
        let gradient_gap = ctx
            .coarse
            .iter()
            .map(|p| gradient_identity_with(&ctx.f, &mu, p.point).gap)
            .fold(0.0, f64::max);
        let heavy: Vec<&Arc> = arcs.iter().filter(|a| is_heavy_arc(&mu, a).heavy).collect();
        let mut per_eps = Vec::new();
        for &eps in &ctx.config.eps_ladder {
            let found: Vec<Result<Option<_>>> = heavy.par_iter().map(|a| light_subarc_search(&mu, a, eps, delta_min)).collect();
            let mut delta: Option<f64> = None;
            let mut missing = 0;
            for r in found {
                match r {
                    Ok(Some(j)) => delta = Some(delta.map_or(j.delta, |d: f64| d.min(j.delta))),
                    Ok(None) => missing += 1,
                    Err(e) => errors.push((format!("alpha={alpha} eps={eps}"), e.to_string())),
                }
            }
            per_eps.push(json!({ "eps": eps, "delta": delta, "not_found": missing }));
        }
        per_alpha.push(json!({
            "alpha": alpha,
            "atoms": mu.len(),
            "total_mass": mu.total_mass(),
            "herglotz_constant": mu.herglotz_constant,
            "heavy_arcs": heavy.len(),
            "gradient_identity_max_gap": gradient_gap,
            "per_eps": per_eps,
        }));
    }
    let mut s = Section::new("Aleksandrov–Clark measures: light sub-arcs of heavy arcs")
        .call("clark_measure", json!({ "alphas": ctx.config.alphas }))
        .call("light_subarc_search", json!({ "eps": ctx.config.eps_ladder, "delta_min": delta_min, "arcs": "dyadic", "levels": [g.base_level, g.max_level], "heavy_constant": HEAVY_CONSTANT }))
        .call("gradient_identity_with", json!({ "grid": "coarse" }))
        .note("arcs searched are dyadic; δ is the smallest relative length needed over heavy arcs");
    s.statistics = json!({ "per_alpha": per_alpha });
    s.absorb_errors(&errors)
}

fn section_blaschke(ctx: &Context) -> Section {
    let mut s = Section::new("F is a Blaschke product")
        .note("the input is a finite Blaschke product by construction");
    s.statistics = json!({ "holds": true, "degree": ctx.f.degree() });
    s
}

fn section_carleson(ctx: &Context) -> Section {
    let g = &ctx.config.grid;
    let sigma = zero_measure(&ctx.f);
    let c = carleson_constant_with_witness(&sigma, g.base_level, g.max_level);
    let mut s = Section::new("Zero measure σ is Carleson")
        .call("carleson_constant_with_witness", json!({ "base_level": g.base_level, "max_level": g.max_level }))
        .note(DYADIC_NOTE);
    s.statistics = json!({ "carleson_constant": c.value, "total_mass": sigma.total_mass() });
    s.witnesses = json!({ "square": c.witness.map(|q| q.key()) });
    s
}

fn section_light_squares(ctx: &Context) -> Section {
    let g = &ctx.config.grid;
    let sigma = zero_measure(&ctx.f);
    let heavy: Vec<DyadicSquare> = occupied_squares(&sigma, g.base_level, g.max_level)
        .into_keys()
        .filter(|q| is_heavy_square(&sigma, *q).heavy)
        .collect();
    let mut per_eps = Vec::new();
    let mut witnesses = Vec::new();
    let mut errors = Vec::new();
    for &eps in &ctx.config.eps_ladder {
        let found: Vec<(DyadicSquare, Result<Option<_>>)> =
            heavy.par_iter().map(|q| (*q, light_subsquare_search(&sigma, *q, eps, g.search_depth))).collect();
        let mut delta: Option<(f64, DyadicSquare)> = None;
        let mut missing = Vec::new();
        for (q, r) in found {
            match r {
                Ok(Some(l)) => {
                    if delta.is_none_or(|(d, _)| l.delta < d) {
                        delta = Some((l.delta, q));
                    }
                }
                Ok(None) => missing.push(q.key()),
                Err(e) => errors.push((q.key(), e.to_string())),
            }
        }
        per_eps.push(json!({ "eps": eps, "delta": delta.map(|d| d.0), "not_found": missing.len() }));
        witnesses.push(json!({
            "eps": eps,
            "smallest_delta_square": delta.map(|d| d.1.key()),
            "not_found": missing.iter().take(16).collect::<Vec<_>>(),
        }));
    }
    let mut s = Section::new("Light sub-squares of heavy squares")
        .call("light_subsquare_search", json!({ "eps": ctx.config.eps_ladder, "max_depth": g.search_depth, "heavy_constant": HEAVY_CONSTANT }))
        .note(DYADIC_NOTE)
        .note("heavy squares are searched among occupied dyadic squares between base_level and max_level");
    s.statistics = json!({ "heavy_squares": heavy.len(), "per_eps": per_eps });
    s.witnesses = json!(witnesses);
    s.absorb_errors(&errors)
}

fn section_critical_set(ctx: &Context) -> Section {
    let title = "Critical set";
    match &ctx.crit {
        Ok(c) => {
            let mut s = Section::new(title).call("critical_points", json!({}));
            s.statistics = json!({ "count": c.len(), "expected": ctx.f.degree().saturating_sub(1) });
            s.witnesses = json!({ "points": c.points.iter().map(|p| point_json(*p)).collect::<Vec<_>>() });
            s
        }
        Err(e) => Section::failed(title, e),
    }
}

fn section_quasi_separation(ctx: &Context) -> Section {
    let title = "Critical set is quasi-separated";
    let crit = match &ctx.crit {
        Ok(c) => c,
        Err(e) => return Section::failed(title, e),
    };
    match quasi_separation_count(&crit.points, 1.0) {
        Ok(q) => {
            let sep = separation_constant(&crit.points);
            let mut s = Section::new(title)
                .call("quasi_separation_count", json!({ "radius": 1.0 }))
                .call("separation_constant", json!({}));
            s.statistics = json!({
                "bound": q.bound,
                "point_centered": q.point_centered,
                "separation": if sep.is_finite() { json!(sep) } else { json!(null) },
            });
            if !sep.is_finite() {
                s.notes.push("fewer than two critical points; separation is +∞".into());
            }
            s
        }
        Err(e) => Section::failed(title, &e),
    }
}

fn section_density(ctx: &Context) -> Section {
    let title = "Uniform upper density of the critical set";
    let crit = match &ctx.crit {
        Ok(c) => c,
        Err(e) => return Section::failed(title, e),
    };
    let d = &ctx.config.density;
    let run = || -> Result<(Value, Value)> {
        let a_grid = dyadic_centers(3, d.a_level, true)?;
        let ladder = default_r_ladder(d.r_max, d.rungs)?;
        let est = uniform_upper_density(&crit.points, &a_grid, &ladder)?;
        // hyperbolic perturbation of each point by at most `perturbation`
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
        let moved: Vec<DiskPoint> = crit
            .points
            .iter()
            .map(|c| {
                let t = distance_to_rho(d.perturbation * rng.gen::<f64>());
                let v = Complex64::from_polar(t, TAU * rng.gen::<f64>());
                Mobius::to_origin(*c).inverse().apply(DiskPoint::new(v)?)
            })
            .collect::<Result<_>>()?;
        let perturbed = uniform_upper_density(&moved, &a_grid, &ladder)?;
        let rows: Vec<Value> = est
            .r_ladder
            .iter()
            .zip(&est.values)
            .map(|(r, row)| json!({ "r": r, "max_over_a": row.iter().cloned().fold(0.0, f64::max) }))
            .collect();
        Ok((
            json!({
                "d_plus": est.d_plus,
                "a_grid_points": est.a_grid.len(),
                "ladder": rows,
                "perturbed_d_plus": perturbed.d_plus,
                "perturbation_shift": (perturbed.d_plus - est.d_plus).abs(),
            }),
            json!({ "a": est.witness.map(point_json) }),
        ))
    };
    match run() {
        Ok((stats, wit)) => {
            let mut s = Section::new(title)
                .call("uniform_upper_density", json!({ "a_level": d.a_level, "r_max": d.r_max, "rungs": d.rungs }))
                .call("perturbation", json!({ "max_distance": d.perturbation, "seed": ctx.config.seed }))
                .note("d_plus is the top-rung value, not an extrapolated limit");
            s.statistics = stats;
            s.witnesses = wit;
            s
        }
        Err(e) => Section::failed(title, &e),
    }
}

fn section_curvature(ctx: &Context) -> (Section, Vec<(String, f64)>) {
    let title = "Gauss curvature equation residual";
    let crit = match &ctx.crit {
        Ok(c) => c,
        Err(e) => return (Section::failed(title, e), Vec::new()),
    };
    let clearance = 2.0 * CURVATURE_CRITICAL_CLEARANCE;
    let points: Vec<&GridPoint> = ctx.coarse.iter().filter(|p| crit.distance_from(p.point) > clearance).collect();
    let results: Vec<(String, Result<(f64, f64)>)> = points
        .par_iter()
        .map(|p| {
            let z = p.point;
            let rho = distance_to_rho(crit.distance_from(z)).min(1.0);
            // the residual is second order in h relative to the local scale
            let h = 1e-2 * (1.0 - z.abs()) * rho * rho;
            let r = gauss_curvature_residual_with(&ctx.f, crit, z, h).and_then(|coarse| {
                let fine = gauss_curvature_residual_with(&ctx.f, crit, z, 0.5 * h)?;
                // hyperbolic units: Δ_h u - D_h²F = (1 - |z|²)² (Δu - e^{2u}) / 4
                let scale = 0.25 * p.gap * p.gap;
                Ok((fine.abs() * scale, coarse / fine))
            });
            (p.key.clone(), r)
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut worst: Option<(String, f64)> = None;
    let mut ratios = Vec::new();
    for (k, r) in results {
        match r {
            Ok((rel, ratio)) => {
                if worst.as_ref().is_none_or(|w| rel > w.1) {
                    worst = Some((k.clone(), rel));
                }
                ratios.push(ratio);
                rows.push((k, rel));
            }
            Err(e) => errors.push((k, e.to_string())),
        }
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios.get(ratios.len() / 2).copied();
    let max_rel = worst.as_ref().map(|w| w.1);
    let mut s = Section::new(title)
        .call("gauss_curvature_residual", json!({ "h": "1e-2 (1 - |z|) ρ(z, crit)^2 and half of it", "clearance": clearance, "grid": "coarse" }))
        .note("residual in hyperbolic units, (1 - |z|²)² |Δu - e^{2u}| / 4, at the finer step");
    s.statistics = json!({
        "points": rows.len(),
        "max_hyperbolic_residual": max_rel,
        "median_refinement_ratio": median,
        "passing": max_rel.is_some_and(|m| m <= CURVATURE_PASS_TOLERANCE),
        "tolerance": CURVATURE_PASS_TOLERANCE,
    });
    s.witnesses = json!({ "worst": worst.map(|w| w.0) });
    (s.absorb_errors(&errors), rows)
}

fn section_jensen(ctx: &Context) -> Section {
    let title = "Jensen balance for log|F'|";
    let crit = match &ctx.crit {
        Ok(c) => c,
        Err(e) => return Section::failed(title, e),
    };
    if ctx.f.derivative(DiskPoint::origin()).norm() == 0.0 {
        return Section::skipped(title, "F'(0) = 0");
    }
    let nodes = 1 << 14;
    let mut last = None;
    for k in 0..8 {
        let r = 0.9 - 0.01 * k as f64;
        match jensen_balance_with(&ctx.f, crit, r, nodes) {
            Ok(j) => {
                let mut s = Section::new(title).call("jensen_balance", json!({ "r": r, "n_nodes": nodes }));
                s.statistics = serde_json::to_value(j).unwrap_or(Value::Null);
                return s;
            }
            Err(e @ Error::Precondition(_)) => last = Some(e),
            Err(e) => return Section::failed(title, &e),
        }
    }
    let reason = last.map(|e| e.to_string()).unwrap_or_default();
    Section::skipped(title, format!("no admissible radius near 0.9: {reason}"))
}

/// Pointwise implications between the image statistics.
fn section_consistency(grids: &BTreeMap<String, Vec<(String, f64)>>, radius: f64) -> Section {
    let get = |name: &str| -> BTreeMap<&str, f64> {
        grids.get(name).map(|rows| rows.iter().map(|(k, v)| (k.as_str(), *v)).collect()).unwrap_or_default()
    };
    let (diam, cont, maxd, mult, sampled) =
        (get("diameter"), get("containment"), get("max_derivative"), get("area_multiplicity"), get("area_sampled"));
    let area = ball_area(radius);
    let mut checks = Vec::new();
    let mut check = |name: &str, margins: Vec<f64>| {
        let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(json!({
            "check": name,
            "points": margins.len(),
            "worst_margin": if worst.is_finite() { json!(worst) } else { json!(null) },
            "holds": worst >= 0.0 || margins.is_empty(),
        }));
    };
    // F(B) ⊃ B_h(F(z), c) forces diam ≥ 2c
    check("diameter >= 2 containment", cont.iter().filter_map(|(k, c)| diam.get(k).map(|d| d - 2.0 * c + 1e-6)).collect());
    check("containment <= R", cont.values().map(|c| radius - c).collect());
    // ∫_B D_h² dA_h ≤ A_h(B) max D_h² ≤ A_h(B) max D_h
    check(
        "max derivative >= area with multiplicity / ball area",
        mult.iter().filter_map(|(k, a)| maxd.get(k).map(|m| m - a / area + 1e-6)).collect(),
    );
    // the set is covered at least once, up to the target-grid resolution
    check(
        "sampled area <= 1.05 area with multiplicity",
        sampled.iter().filter_map(|(k, s)| mult.get(k).map(|a| 1.05 * a - s)).collect(),
    );
    let mut s = Section::new("Consistency between image statistics")
        .note("inequalities implied pointwise by the definitions; small slack covers sampling error");
    s.statistics = json!({ "checks": checks });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stat(r: &Report, section: &str, pointer: &str) -> f64 {
        r.statistic(section, pointer).and_then(Value::as_f64).unwrap_or_else(|| panic!("{section}{pointer}"))
    }

    #[test]
    fn identity_report() {
        let r = run_battery(&AnalysisConfig::default()).unwrap();
        assert!(!r.has_failures(), "{:?}", r.failed_sections());
        assert!((stat(&r, "1", "/min") - 2.0).abs() < 1e-3);
        assert!((stat(&r, "1d", "/min") - 1.0).abs() < 1e-12);
        assert!((stat(&r, "3", "/s_min") - 1.0).abs() < 1e-12);
        assert_eq!(stat(&r, "6.density", "/d_plus"), 0.0);
        for alpha in r.sections["4"].statistics["per_alpha"].as_array().unwrap() {
            for e in alpha["per_eps"].as_array().unwrap() {
                assert_eq!(e["not_found"], 0);
            }
        }
    }

    #[test]
    fn square_report() {
        let mut c = AnalysisConfig::default();
        c.map.zeros = vec![[0.0, 0.0], [0.0, 0.0]];
        let r = run_battery(&c).unwrap();
        assert!(!r.has_failures(), "{:?}", r.failed_sections());
        assert!(stat(&r, "1d", "/min") > 0.0);
        assert_eq!(stat(&r, "6.critical_set", "/count"), 1.0);
        assert_eq!(r.sections["6.gce_residual"].statistics["passing"], true);
        assert_eq!(r.sections["6.jensen"].status, Status::Skipped);
    }

    #[test]
    fn clustered_report_flags_weak_zero_set() {
        // four zeros at each level-7 center below one level-4 square: every
        // descendant within three levels carries the parent's average
        let mut c = AnalysisConfig::default();
        c.grid.search_depth = 3;
        let q0 = DyadicSquare::new(4, 0).unwrap();
        c.map.zeros = q0
            .descendants(3)
            .flat_map(|q| {
                let z = q.center().value();
                (0..4).map(move |k| [z.re, z.im + 1e-7 * k as f64])
            })
            .collect();
        let r = run_battery(&c).unwrap();
        let carleson = stat(&r, "5b", "/carleson_constant");
        assert!(carleson > 3.0, "{carleson}");
        let small_eps = &r.sections["5c"].statistics["per_eps"][2];
        assert!(small_eps["not_found"].as_u64().unwrap() > 0, "{small_eps}");
    }
}
