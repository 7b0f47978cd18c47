//! Grid exports behind the `contour` command: the fidelity field over the
//! `(tau, y)` plane (fig1a/fig1b) and the optimal fidelity over the
//! `(lambda, s)` plane (fig2a/fig2b), each with its overlay curves.

use std::fmt::Write as _;

use clap::ValueEnum;
use cvteleport::fidelity::{boundary_noise, clamp_active, clamp_onset, is_secure, tangency_point};
use cvteleport::{
    accessible, avg_fidelity, classify, f_opt, no_cloning_threshold, s_ab_min, tau_opt,
    SteeringBudget, SteeringDirection,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::{csv_flag, csv_num, envelope, round_sig, to_compact_json};

pub const DEFAULT_STEP: f64 = 0.005;
pub const FIG1_LAMBDA: f64 = 0.2;
pub const MAX_CELLS: usize = 25_000_000;

/// Budgets sampled along the optimal-protocol curve: zero, then
/// logarithmically spaced up to where the channel is indistinguishable
/// from the identity.
const CURVE_LOG10_RANGE: (f64, f64) = (-3.0, 2.0);
const CURVE_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
}

impl Kind {
    pub fn direction(self) -> SteeringDirection {
        match self {
            Self::Fig1a | Self::Fig2a => SteeringDirection::BToA,
            Self::Fig1b | Self::Fig2b => SteeringDirection::AToB,
        }
    }

    pub fn is_fig1(self) -> bool {
        matches!(self, Self::Fig1a | Self::Fig1b)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1a => "fig1a",
            Self::Fig1b => "fig1b",
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
        }
    }

    /// Default steering budget for the fig1 kinds.
    pub fn default_steering(self) -> f64 {
        match self.direction() {
            SteeringDirection::BToA => 0.4,
            SteeringDirection::AToB => 0.6,
        }
    }

    fn axis_names(self) -> (&'static str, &'static str) {
        if self.is_fig1() {
            ("tau", "y")
        } else {
            ("lambda", "s")
        }
    }

    fn default_ranges(self) -> ((f64, f64), (f64, f64)) {
        if self.is_fig1() {
            ((0.0, 2.0), (0.0, 2.0))
        } else {
            ((0.005, 2.0), (0.0, 3.0))
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        if self.is_fig1() {
            &[
                "tau",
                "y",
                "f_avg",
                "unphysical",
                "eb",
                "sb_ba",
                "sb_ab",
                "accessible",
                "secure",
            ]
        } else {
            &["lambda", "s", "f_opt", "threshold", "secure"]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    /// Points `min + i step` up to `max`; a final partial step is dropped.
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| round_sig(self.min + i as f64 * self.step))
            .collect()
    }

    fn validate(&self, lower: f64, inclusive: bool) -> CliResult<()> {
        let name = self.name;
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(CliError::Validation(format!(
                "{name} axis bounds must be finite"
            )));
        }
        if self.step <= 0.0 {
            return Err(CliError::Validation(format!(
                "{name} step must be positive, got {}",
                self.step
            )));
        }
        if self.max < self.min {
            return Err(CliError::Validation(format!(
                "{name} range is empty ({} > {})",
                self.min, self.max
            )));
        }
        let below = if inclusive {
            self.min < lower
        } else {
            self.min <= lower
        };
        if below {
            let relation = if inclusive { ">=" } else { ">" };
            return Err(CliError::Validation(format!(
                "{name} minimum must be {relation} {lower}, got {}",
                self.min
            )));
        }
        Ok(())
    }

    fn json(&self) -> Value {
        json!({ "name": self.name, "min": self.min, "max": self.max, "step": self.step, "n": self.len() })
    }
}

/// Optional overrides for the two grid axes; unset fields take the
/// kind's defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridOverrides {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_step: Option<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub y_step: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    pub kind: Kind,
    pub lambda: f64,
    pub steering: f64,
    pub x: Axis,
    pub y: Axis,
}

impl ContourSpec {
    pub fn new(
        kind: Kind,
        lambda: Option<f64>,
        steering: Option<f64>,
        grid: GridOverrides,
    ) -> CliResult<Self> {
        if !kind.is_fig1() {
            for (flag, given) in [
                ("--lambda", lambda.is_some()),
                ("--steering", steering.is_some()),
            ] {
                if given {
                    return Err(CliError::Validation(format!(
                        "{flag} does not apply to {}: both axes of that grid are swept",
                        kind.name()
                    )));
                }
            }
        }
        let ((x_lo, x_hi), (y_lo, y_hi)) = kind.default_ranges();
        let (x_name, y_name) = kind.axis_names();
        let step = grid.step.unwrap_or(DEFAULT_STEP);
        let x = Axis {
            name: x_name,
            min: grid.x_min.unwrap_or(x_lo),
            max: grid.x_max.unwrap_or(x_hi),
            step: grid.x_step.unwrap_or(step),
        };
        let y = Axis {
            name: y_name,
            min: grid.y_min.unwrap_or(y_lo),
            max: grid.y_max.unwrap_or(y_hi),
            step: grid.y_step.unwrap_or(step),
        };
        // fig2 needs lambda > 0: the optimal fidelity is undefined for the
        // uniform alphabet
        x.validate(0.0, kind.is_fig1())?;
        y.validate(0.0, true)?;
        let cells = x.len().saturating_mul(y.len());
        if cells > MAX_CELLS {
            return Err(CliError::Validation(format!(
                "grid has {cells} cells, more than the limit of {MAX_CELLS}"
            )));
        }
        let spec = Self {
            kind,
            lambda: lambda.unwrap_or(FIG1_LAMBDA),
            steering: steering.unwrap_or_else(|| kind.default_steering()),
            x,
            y,
        };
        if kind.is_fig1() {
            // surface invalid lambda or budget before sweeping the grid
            tau_opt(spec.lambda, spec.steering, kind.direction())?;
        }
        Ok(spec)
    }

    fn budget(&self) -> SteeringBudget {
        match self.kind.direction() {
            SteeringDirection::BToA => SteeringBudget {
                s_ba: self.steering,
                s_ab: f64::INFINITY,
            },
            SteeringDirection::AToB => SteeringBudget {
                s_ba: f64::INFINITY,
                s_ab: self.steering,
            },
        }
    }

    fn params(&self) -> Value {
        let mut p = json!({ "kind": self.kind.name(), "direction": self.kind.direction() });
        if self.kind.is_fig1() {
            p["lambda"] = self.lambda.into();
            p["steering"] = self.steering.into();
        }
        p["x_axis"] = self.x.json();
        p["y_axis"] = self.y.json();
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Channel {
        tau: f64,
        y: f64,
        /// NaN where the channel is unphysical.
        f_avg: f64,
        unphysical: bool,
        eb: bool,
        sb_ba: bool,
        sb_ab: bool,
        accessible: bool,
        secure: bool,
    },
    Optimum {
        lambda: f64,
        s: f64,
        f_opt: f64,
        threshold: f64,
        secure: bool,
    },
}

impl Cell {
    fn csv(&self, out: &mut String) {
        let _ = match *self {
            Cell::Channel {
                tau,
                y,
                f_avg,
                unphysical,
                eb,
                sb_ba,
                sb_ab,
                accessible,
                secure,
            } => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                csv_num(tau),
                csv_num(y),
                csv_num(f_avg),
                csv_flag(unphysical),
                csv_flag(eb),
                csv_flag(sb_ba),
                csv_flag(sb_ab),
                csv_flag(accessible),
                csv_flag(secure)
            ),
            Cell::Optimum {
                lambda,
                s,
                f_opt,
                threshold,
                secure,
            } => writeln!(
                out,
                "{},{},{},{},{}",
                csv_num(lambda),
                csv_num(s),
                csv_num(f_opt),
                csv_num(threshold),
                csv_flag(secure)
            ),
        };
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Channel {
                tau,
                y,
                f_avg,
                unphysical,
                eb,
                sb_ba,
                sb_ab,
                accessible,
                secure,
            } => {
                json!([tau, y, f_avg, unphysical, eb, sb_ba, sb_ab, accessible, secure])
            }
            Cell::Optimum {
                lambda,
                s,
                f_opt,
                threshold,
                secure,
            } => {
                json!([lambda, s, f_opt, threshold, secure])
            }
        }
    }
}

fn channel_cell(
    tau: f64,
    y: f64,
    lambda: f64,
    threshold: f64,
    budget: &SteeringBudget,
) -> CliResult<Cell> {
    let class = classify(tau, y)?;
    if class.unphysical {
        return Ok(Cell::Channel {
            tau,
            y,
            f_avg: f64::NAN,
            unphysical: true,
            eb: false,
            sb_ba: false,
            sb_ab: false,
            accessible: false,
            secure: false,
        });
    }
    let f = avg_fidelity(tau, y, lambda)?;
    Ok(Cell::Channel {
        tau,
        y,
        f_avg: f,
        unphysical: false,
        eb: class.entanglement_breaking,
        sb_ba: class.sb_b_to_a,
        sb_ab: class.sb_a_to_b,
        accessible: accessible(tau, y, budget)?,
        // the benchmark verdict alone; accessibility is its own column
        secure: is_secure(f, threshold),
    })
}

fn optimum_cell(lambda: f64, s: f64, direction: SteeringDirection) -> CliResult<Cell> {
    let f = f_opt(lambda, s, direction)?;
    let threshold = no_cloning_threshold(lambda)?;
    Ok(Cell::Optimum {
        lambda,
        s,
        f_opt: f,
        threshold,
        secure: is_secure(f, threshold),
    })
}

/// Grid cells with the x axis outer and the y axis inner. Rows are
/// evaluated in parallel; their order is fixed by the x index.
pub fn cells(spec: &ContourSpec) -> CliResult<Vec<Cell>> {
    let xs = spec.x.values();
    let ys = spec.y.values();
    let direction = spec.kind.direction();
    let budget = spec.budget();
    let threshold = no_cloning_threshold(spec.lambda)?;
    let rows: Vec<CliResult<Vec<Cell>>> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    if spec.kind.is_fig1() {
                        channel_cell(x, y, spec.lambda, threshold, &budget)
                    } else {
                        optimum_cell(x, y, direction)
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

fn polyline(xs: &[f64], f: impl Fn(f64) -> f64) -> Value {
    Value::Array(xs.iter().map(|&x| json!([x, f(x)])).collect())
}

/// Budgets along the optimal-protocol curve.
pub fn curve_budgets() -> Vec<f64> {
    let (lo, hi) = CURVE_LOG10_RANGE;
    std::iter::once(0.0)
        .chain((0..CURVE_POINTS).map(|i| {
            let t = i as f64 / (CURVE_POINTS - 1) as f64;
            10f64.powf(lo + (hi - lo) * t)
        }))
        .collect()
}

fn protocol_point(lambda: f64, s: f64, direction: SteeringDirection) -> CliResult<Value> {
    let tau = tau_opt(lambda, s, direction)?;
    Ok(json!({
        "s": s,
        "tau": tau,
        "y": boundary_noise(tau, s, direction),
        "f_avg": f_opt(lambda, s, direction)?,
        "clamp": clamp_active(lambda, s, direction)?,
    }))
}

fn fig1_overlays(spec: &ContourSpec) -> CliResult<Value> {
    let taus = spec.x.values();
    let (lambda, s, direction) = (spec.lambda, spec.steering, spec.kind.direction());
    let threshold = no_cloning_threshold(lambda)?;
    let accessible_boundary = polyline(&taus, |tau| boundary_noise(tau, s, direction));
    // y where the average fidelity equals the benchmark, kept on the
    // physical side of the complete-positivity boundary
    let level = |tau: f64| 2.0 / threshold - 1.0 - tau - 2.0 * (1.0 - tau.sqrt()).powi(2) / lambda;
    let no_cloning: Vec<Value> = taus
        .iter()
        .filter_map(|&tau| {
            let y = level(tau);
            (y >= (1.0 - tau).abs() - cvteleport::gaussian::TOL).then(|| json!([tau, y]))
        })
        .collect();
    let curve = curve_budgets()
        .into_iter()
        .map(|b| protocol_point(lambda, b, direction))
        .collect::<CliResult<Vec<_>>>()?;
    let boundary_budget = match direction {
        SteeringDirection::BToA => 0.0,
        SteeringDirection::AToB => s_ab_min(lambda)?,
    };
    let t = tangency_point(lambda);
    Ok(json!({
        "cp_boundary": polyline(&taus, |tau| (1.0 - tau).abs()),
        "eb_boundary": polyline(&taus, |tau| 1.0 + tau),
        "sb_ba_boundary": polyline(&taus, |tau| 0.5 * (1.0 + (2.0 * tau - 1.0).abs())),
        "sb_ab_boundary": polyline(&taus, |tau| (1.0 - tau).abs().max(1.0)),
        "accessible_boundary": accessible_boundary,
        "no_cloning_contour": no_cloning,
        "optimal_curve": curve,
        "special_points": {
            "optimum": protocol_point(lambda, s, direction)?,
            "secure_boundary": protocol_point(lambda, boundary_budget, direction)?,
            "tangency": { "tau": t, "y": t },
        },
    }))
}

fn fig2_overlays(spec: &ContourSpec) -> CliResult<Value> {
    let direction = spec.kind.direction();
    let lambdas = spec.x.values();
    let secure_boundary = lambdas
        .iter()
        .map(|&l| {
            let s = match direction {
                SteeringDirection::BToA => 0.0,
                SteeringDirection::AToB => s_ab_min(l)?,
            };
            Ok(json!([l, s]))
        })
        .collect::<CliResult<Vec<_>>>()?;
    // onset of the clamp branch as (lambda, s); budgets whose clamp never
    // activates are omitted
    let mut clamp_boundary = Vec::new();
    for s in spec.y.values() {
        let onset = clamp_onset(s, direction)?;
        if onset.is_finite() {
            clamp_boundary.push(json!([onset, s]));
        }
    }
    Ok(json!({
        "secure_boundary": secure_boundary,
        "clamp_boundary": clamp_boundary,
    }))
}

pub fn to_csv(spec: &ContourSpec, cells: &[Cell]) -> String {
    let mut out = spec.kind.columns().join(",");
    out.push('\n');
    for cell in cells {
        cell.csv(&mut out);
    }
    out
}

pub fn to_json_document(spec: &ContourSpec, cells: &[Cell]) -> CliResult<String> {
    let mut data = json!({
        "columns": spec.kind.columns(),
        "rows": cells.iter().map(Cell::json).collect::<Vec<_>>(),
    });
    if spec.kind.is_fig1() {
        data["threshold"] = no_cloning_threshold(spec.lambda)?.into();
        data["overlays"] = fig1_overlays(spec)?;
    } else {
        data["overlays"] = fig2_overlays(spec)?;
    }
    Ok(to_compact_json(&envelope(spec.params(), data)))
}
