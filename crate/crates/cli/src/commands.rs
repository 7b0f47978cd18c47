use cvteleport::fidelity::{boundary_noise, clamp_active, is_secure, tangency_point, McSummary};
use cvteleport::montecarlo::mc_channel_fidelity;
use cvteleport::teleport::{
    finite_energy_interval, optimal_resource, sab_family_member, sab_family_min_a,
    sba_family_member, sba_family_min_a,
};
use cvteleport::{
    classify as classify_channel, f_opt, no_cloning_threshold, s_ab_min, security_report, tau_opt,
    Error as CoreError, ResourceSpec, RngStream, SteeringBudget, SteeringDirection,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// Allowed slack on the Monte Carlo agreement band when the standard error
/// vanishes (noiseless channels give identical samples).
pub const AGREEMENT_FLOOR: f64 = 1e-12;
pub const AGREEMENT_SIGMAS: f64 = 4.0;

/// Result of a command: its inputs, its payload and, for results that are
/// reported but still count as a failure, the error that sets the exit code.
pub struct Report {
    pub params: Value,
    pub data: Value,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(params: Value, data: Value) -> Self {
        Self {
            params,
            data,
            failure: None,
        }
    }
}

pub fn classify(tau: f64, y: f64) -> CliResult<Report> {
    let class = classify_channel(tau, y)?;
    let data = serde_json::to_value(class).expect("channel class serializes");
    Ok(Report::ok(json!({ "tau": tau, "y": y }), data))
}

pub fn threshold(lambda: f64) -> CliResult<Report> {
    let t = tangency_point(lambda);
    let data = json!({
        "threshold": no_cloning_threshold(lambda)?,
        "s_ab_min": s_ab_min(lambda)?,
        "tangency": { "tau": t, "y": t },
    });
    Ok(Report::ok(json!({ "lambda": lambda }), data))
}

/// Re-derives what a resource claims about itself before it is printed.
fn check_resource(spec: &ResourceSpec, tau: f64, y: f64) -> CliResult<()> {
    let state = spec.state();
    if !state.is_physical() {
        return Err(CliError::Internal(format!(
            "resource (a, b, c) = ({}, {}, {}) is not a physical state",
            spec.a, spec.b, spec.c
        )));
    }
    let measured = state.steerability(spec.direction)?;
    let budget = spec.steering_budget;
    if (measured - budget).abs() > 1e-8 * budget.max(1.0) {
        return Err(CliError::Internal(format!(
            "resource steerability {measured} differs from its budget {budget}"
        )));
    }
    let channel = spec.channel()?;
    if (channel.tau() - tau).abs() > 1e-9 * tau.max(1.0)
        || (channel.y() - y).abs() > 1e-8 * y.max(1.0)
    {
        return Err(CliError::Internal(format!(
            "resource induces ({}, {}) instead of ({tau}, {y})",
            channel.tau(),
            channel.y()
        )));
    }
    if !(spec.energy.is_finite() && spec.energy >= 0.0) {
        return Err(CliError::Internal(format!(
            "resource energy {} is not finite",
            spec.energy
        )));
    }
    Ok(())
}

fn resource_json(spec: &ResourceSpec) -> Value {
    json!({
        "a": spec.a,
        "b": spec.b,
        "c": spec.c,
        "g": spec.g,
        "energy": spec.energy,
    })
}

pub fn optimal(lambda: f64, steering: f64, direction: SteeringDirection) -> CliResult<Report> {
    let params = json!({ "lambda": lambda, "steering": steering, "direction": direction });
    let tau = tau_opt(lambda, steering, direction)?;
    let f = f_opt(lambda, steering, direction)?;
    let threshold = no_cloning_threshold(lambda)?;
    let clamp = clamp_active(lambda, steering, direction)?;
    let y = boundary_noise(tau, steering, direction);
    let mut data = json!({
        "tau_opt": tau,
        "y_boundary": y,
        "f_opt": f,
        "threshold": threshold,
        "secure": is_secure(f, threshold),
        "clamp": clamp,
    });
    let resource = if steering.is_infinite() {
        let (lower, upper) = finite_energy_interval(steering, direction);
        Err(CoreError::DivergentEnergy { tau, lower, upper })
    } else {
        optimal_resource(tau, steering, direction)
    };
    match resource {
        Ok(spec) => {
            check_resource(&spec, tau, y)?;
            data["resource"] = resource_json(&spec);
            data["cross_steerability"] = spec.cross_steerability()?.into();
            Ok(Report::ok(params, data))
        }
        // the optimum is a supremum here; report it but refuse the resource
        Err(e @ CoreError::DivergentEnergy { .. }) => {
            let err = CliError::from(e);
            data["resource"] = Value::Null;
            data["cross_steerability"] = Value::Null;
            data["error"] = err.to_json();
            Ok(Report {
                params,
                data,
                failure: Some(err),
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn resource(
    tau: f64,
    steering: f64,
    direction: SteeringDirection,
    a: Option<f64>,
) -> CliResult<Report> {
    let a_min = match direction {
        SteeringDirection::BToA => sba_family_min_a(tau, steering)?,
        SteeringDirection::AToB => sab_family_min_a(tau, steering)?,
    };
    let a = a.unwrap_or(a_min);
    let spec = match direction {
        SteeringDirection::BToA => sba_family_member(tau, steering, a)?,
        SteeringDirection::AToB => sab_family_member(tau, steering, a)?,
    };
    let y = boundary_noise(tau, steering, direction);
    check_resource(&spec, tau, y)?;
    let mut data = resource_json(&spec);
    data["a_min"] = a_min.into();
    data["minimal"] = (a == a_min).into();
    data["family"] = serde_json::to_value(spec.family).expect("family serializes");
    data["cross_steerability"] = spec.cross_steerability()?.into();
    data["channel"] = json!({ "tau": tau, "y": y });
    let params = json!({ "tau": tau, "steering": steering, "direction": direction, "a": a });
    Ok(Report::ok(params, data))
}

pub struct VerifyArgs {
    pub tau: f64,
    pub y: f64,
    pub lambda: f64,
    pub n: usize,
    pub seed: u64,
    pub s_ba: Option<f64>,
    pub s_ab: Option<f64>,
}

pub fn verify(args: &VerifyArgs) -> CliResult<Report> {
    let budget = SteeringBudget::new(
        args.s_ba.unwrap_or(f64::INFINITY),
        args.s_ab.unwrap_or(f64::INFINITY),
    )?;
    let mut report = security_report(args.tau, args.y, args.lambda, budget)?;
    let est = mc_channel_fidelity(
        args.tau,
        args.y,
        args.lambda,
        args.n,
        &RngStream::new(args.seed),
    )?;
    report.mc = Some(McSummary {
        estimate: est.mean,
        std_error: est.std_error,
        n_samples: est.n,
        seed: est.seed,
        agrees: (est.mean - report.f_avg).abs()
            <= AGREEMENT_SIGMAS * est.std_error + AGREEMENT_FLOOR,
    });
    let data = serde_json::to_value(report).expect("fidelity report serializes");
    let params = json!({
        "tau": args.tau,
        "y": args.y,
        "lambda": args.lambda,
        "n": args.n,
        "seed": args.seed,
        "s_ba": args.s_ba,
        "s_ab": args.s_ab,
    });
    Ok(Report::ok(params, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_reports_resource_consistent_with_optimum() {
        let r = optimal(0.2, 0.4, SteeringDirection::BToA).unwrap();
        assert!(r.failure.is_none());
        let a = r.data["resource"]["a"].as_f64().unwrap();
        let tau = r.data["tau_opt"].as_f64().unwrap();
        assert_eq!(a, sba_family_min_a(tau, 0.4).unwrap());
        assert_eq!(r.data["secure"], json!(true));
    }

    #[test]
    fn clamp_branch_is_reported_with_failure() {
        let r = optimal(2.0, 0.4, SteeringDirection::BToA).unwrap();
        assert_eq!(r.data["clamp"], json!(true));
        assert!(r.data["resource"].is_null());
        assert_eq!(r.failure.unwrap().exit_code(), 3);
    }

    #[test]
    fn verify_floor_accepts_noiseless_identity() {
        let args = VerifyArgs {
            tau: 1.0,
            y: 0.0,
            lambda: 0.2,
            n: 100,
            seed: 1,
            s_ba: None,
            s_ab: None,
        };
        let r = verify(&args).unwrap();
        assert_eq!(r.data["mc"]["estimate"], json!(1.0));
        assert_eq!(r.data["mc"]["agrees"], json!(true));
    }
}
