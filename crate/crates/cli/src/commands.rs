//! One function per subcommand: validate parameters, run the core
//! computation, and collect metrics and tolerance checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use spinstat_core::dynamics::{RotationSchedule, PHASE_CONVENTION};
use spinstat_core::experiments::{
    alpha_grid, controlled_rotation_interferometer, correlator_table, entanglement_sweep,
    gravito_curl_check, gravito_efield_check, ChainVerdict, TransportModel,
};
use spinstat_core::qcore::{wrap_phase, C64};
use spinstat_core::spinrep::{spin_operators, two_pi_phase, SpinLabel, Vec3};
use spinstat_core::suites::{
    majorana_check, rotation_phase_table, schedule_table, standard_full_turn_schedules,
    wave_equation_suite, BOOST_TRIALS, NULLITY_MOMENTA, SQUARING_POINTS,
};

use crate::config::{
    check_two_s, load_schedule_file, parse_grid, parse_segments, Command, Parameters,
};
use crate::error::{CliError, CliResult};
use crate::output::{format_f64, Metric, ResultEnvelope, Table, SCHEMA_VERSION};

/// Random axes per spin in the full-turn table.
pub const ROTATION_AXES: usize = 10;
/// Largest 2S for which the Majorana embedding is checked.
pub const MAJORANA_MAX_TWO_S: u32 = 12;

const DEFAULT_OMEGAS: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [1.0, 2.0, 3.0], [-0.5, 0.25, 2.0]];

pub fn default_tolerances(command: Command) -> &'static [(&'static str, f64)] {
    match command {
        Command::LlCheck => &[
            ("condition", 1e-12),
            ("covariance", 1e-9),
            ("squaring", 1e-10),
        ],
        Command::SpinRep => &[("algebra", 1e-12), ("majorana", 1e-10), ("two_pi", 1e-10)],
        Command::ExchangePhase => &[("phase", 1e-9)],
        Command::Interferometer => &[("phase", 1e-9), ("visibility", 1e-9)],
        Command::EntangleSweep => &[
            ("amplitude", 1e-12),
            ("concurrence", 1e-9),
            ("entropy", 1e-9),
        ],
        Command::CorrelatorCheck => &[("residual", 1e-12)],
        Command::GravitoCheck => &[("curl", 1e-6), ("efield", 1e-6)],
        Command::All => &[],
    }
}

/// One subcommand's envelope plus the file stem and optional CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stem: String,
    pub envelope: ResultEnvelope,
    pub table: Option<Table>,
}

struct Checks {
    tolerances: BTreeMap<String, f64>,
    metrics: BTreeMap<String, Metric>,
    failed: Vec<String>,
}

impl Checks {
    fn new(command: Command, overrides: &BTreeMap<String, f64>) -> CliResult<Self> {
        let mut tolerances: BTreeMap<String, f64> = default_tolerances(command)
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect();
        for (k, v) in overrides {
            match tolerances.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    let known: Vec<&str> = tolerances.keys().map(String::as_str).collect();
                    return Err(CliError::usage(format!(
                        "{command} has no tolerance '{k}' (known: {})",
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(Self {
            tolerances,
            metrics: BTreeMap::new(),
            failed: Vec::new(),
        })
    }

    fn metric(&mut self, name: impl Into<String>, value: impl Into<Metric>) {
        self.metrics.insert(name.into(), value.into());
    }

    fn below(&mut self, name: impl Into<String>, value: f64, tol_key: &str) {
        let name = name.into();
        let tol = self.tolerances[tol_key];
        if !(value.is_finite() && value < tol) {
            self.failed.push(format!(
                "{name} = {} (tolerance {tol_key} = {})",
                format_f64(value),
                format_f64(tol)
            ));
        }
        self.metric(name, value);
    }

    fn require(&mut self, name: impl Into<String>, ok: bool) {
        let name = name.into();
        if !ok {
            self.failed.push(format!("{name} does not hold"));
        }
        self.metric(name, if ok { 1.0 } else { 0.0 });
    }

    fn finish(self, command: Command, seed: u64, echo: Parameters) -> ResultEnvelope {
        ResultEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            subcommand: command.name().into(),
            seed,
            phase_convention: PHASE_CONVENTION.into(),
            parameters_echo: echo,
            metrics: self.metrics,
            tolerances: self.tolerances,
            pass: self.failed.is_empty(),
            failed_checks: self.failed,
        }
    }
}

fn spin(two_s: u32) -> CliResult<SpinLabel> {
    Ok(SpinLabel::from_two_s(check_two_s(two_s)?))
}

fn spin_list(two_s: Option<u32>, default: &[u32]) -> CliResult<Vec<SpinLabel>> {
    match two_s {
        Some(n) => Ok(vec![spin(n)?]),
        None => Ok(default.iter().map(|&n| SpinLabel::from_two_s(n)).collect()),
    }
}

fn stem(command: Command, two_s: Option<u32>) -> String {
    match two_s {
        Some(n) => format!("{command}_2s{n}"),
        None => command.name().to_string(),
    }
}

fn cell(v: f64) -> String {
    format_f64(v)
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

pub fn execute(command: Command, p: &Parameters, seed: u64) -> CliResult<Outcome> {
    match command {
        Command::LlCheck => ll_check(p, seed),
        Command::SpinRep => spin_rep(p, seed),
        Command::ExchangePhase => exchange_phase(p, seed),
        Command::Interferometer => interferometer(p, seed),
        Command::EntangleSweep => entangle_sweep(p, seed),
        Command::CorrelatorCheck => correlator_check(p, seed),
        Command::GravitoCheck => gravito_check(p, seed),
        Command::All => Err(CliError::usage("`all` runs through run_all")),
    }
}

fn ll_check(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::LlCheck;
    p.only(command, &["mass"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let mass = p.mass.unwrap_or(1.0);
    let report = wave_equation_suite(mass, seed)?;

    for (name, r) in report.conditions.named() {
        checks.below(format!("condition.{name}"), r, "condition");
    }
    checks.metric("squaring.points", SQUARING_POINTS as f64);
    checks.below(
        "squaring.max_residual",
        report.max_squaring_residual,
        "squaring",
    );
    let min = report.nullities.iter().copied().min().unwrap_or(0);
    let max = report.nullities.iter().copied().max().unwrap_or(0);
    checks.metric("nullity.momenta", NULLITY_MOMENTA as f64);
    checks.metric("nullity.min", min as f64);
    checks.metric("nullity.max", max as f64);
    checks.require("nullity.all_two", report.nullities_all_two());
    checks.metric("covariance.trials", BOOST_TRIALS as f64);
    checks.below(
        "covariance.max_residual",
        report.max_covariance_residual,
        "covariance",
    );

    let echo = Parameters {
        mass: Some(mass),
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, None),
        envelope: checks.finish(command, seed, echo),
        table: None,
    })
}

fn spin_rep(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::SpinRep;
    p.only(command, &["two_s"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let spins = spin_list(p.two_s, &[0, 1, 2, 3, 4])?;
    let table = rotation_phase_table(&spins, ROTATION_AXES, seed)?;
    checks.metric("axes_per_spin", ROTATION_AXES as f64);
    for row in &table {
        let s = row.spin;
        let prefix = format!("2s{}", s.two_s());
        checks.metric(
            format!("{prefix}.exchange_sign"),
            f64::from(s.exchange_sign()),
        );
        checks.below(
            format!("{prefix}.two_pi_deviation"),
            row.max_deviation,
            "two_pi",
        );
        checks.metric(format!("{prefix}.two_pi_phase"), two_pi_phase(s)?);
        let ops = spin_operators(s);
        checks.below(
            format!("{prefix}.commutator_residual"),
            ops.commutator_residual(),
            "algebra",
        );
        checks.below(
            format!("{prefix}.casimir_residual"),
            ops.casimir_residual(s),
            "algebra",
        );
        if (1..=MAJORANA_MAX_TWO_S).contains(&s.two_s()) {
            checks.below(
                format!("{prefix}.majorana_residual"),
                majorana_check(s, seed)?,
                "majorana",
            );
        }
    }
    let echo = Parameters {
        two_s: p.two_s,
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, p.two_s),
        envelope: checks.finish(command, seed, echo),
        table: None,
    })
}

fn exchange_phase(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::ExchangePhase;
    p.only(command, &["two_s", "schedule", "schedule_file"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let spins = spin_list(p.two_s, &[1, 2, 3])?;
    let schedules: Vec<(String, RotationSchedule)> = match (&p.schedule, &p.schedule_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "give either --schedule or --schedule-file, not both",
            ))
        }
        (Some(spec), None) => vec![(
            "inline".into(),
            RotationSchedule::from_z_segments(&parse_segments(spec)?)?,
        )],
        (None, Some(path)) => vec![("file".into(), load_schedule_file(path)?)],
        (None, None) => standard_full_turn_schedules()?,
    };

    let mut rows = Vec::new();
    for &s in &spins {
        for row in schedule_table(s, &schedules)? {
            let prefix = format!("2s{}.{}", s.two_s(), row.name);
            checks.metric(format!("{prefix}.total_angle"), row.total_angle);
            checks.metric(format!("{prefix}.fidelity"), row.fidelity);
            if let Some(ph) = row.phase {
                checks.metric(format!("{prefix}.phase"), ph);
            }
            if let Some(dev) = row.deviation {
                checks.below(format!("{prefix}.deviation"), dev, "phase");
            }
            rows.push(vec![
                s.two_s().to_string(),
                row.name.clone(),
                cell(row.total_angle),
                opt_cell(row.phase),
                cell(row.fidelity),
                opt_cell(row.deviation),
            ]);
        }
    }
    let echo = Parameters {
        two_s: p.two_s,
        schedule: p.schedule.clone(),
        schedule_file: p.schedule_file.clone(),
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, p.two_s),
        envelope: checks.finish(command, seed, echo),
        table: Some(Table {
            header: vec![
                "two_s",
                "schedule",
                "total_angle",
                "phase",
                "fidelity",
                "deviation",
            ],
            rows,
        }),
    })
}

fn interferometer(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::Interferometer;
    p.only(command, &["two_s", "alpha", "model"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let two_s = p.two_s.unwrap_or(1);
    let s = spin(two_s)?;
    let alpha = p.alpha.unwrap_or(1.0);
    let model_name = p.model.clone().unwrap_or_else(|| "dynamical".into());
    let model: TransportModel = model_name.parse().map_err(CliError::Usage)?;
    let r = controlled_rotation_interferometer(s, alpha, model)?;

    let expected = match model {
        TransportModel::Dynamical => wrap_phase(-PI * alpha * f64::from(two_s)),
        TransportModel::ModeRelabeling => 0.0,
    };
    checks.metric("expected_phase", expected);
    checks.metric("control.rho10", r.control_state.entries()[(1, 0)]);
    checks.metric("visibility", r.visibility);
    checks.below(
        "visibility_deviation",
        (r.visibility - 1.0).abs(),
        "visibility",
    );
    match r.phase {
        Some(ph) => {
            checks.metric("phase", ph);
            checks.below("phase_deviation", wrap_phase(ph - expected).abs(), "phase");
        }
        None => checks.require("phase_defined", false),
    }
    let echo = Parameters {
        two_s: Some(two_s),
        alpha: Some(alpha),
        model: Some(model.name().into()),
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, Some(two_s)),
        envelope: checks.finish(command, seed, echo),
        table: None,
    })
}

fn binary_entropy(c: f64) -> f64 {
    let lam = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    [lam, 1.0 - lam]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn entangle_sweep(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::EntangleSweep;
    p.only(command, &["two_s", "alphas"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let two_s = p.two_s.unwrap_or(1);
    let s = spin(two_s)?;
    let grid_spec = p.alphas.clone().unwrap_or_else(|| "0:1:0.1".into());
    let (a, b, step) = parse_grid(&grid_spec)?;
    let grid = alpha_grid(a, b, step)?;
    let points = entanglement_sweep(s, &grid)?;

    let mut c_dev = 0.0f64;
    let mut e_dev = 0.0f64;
    let mut amp_dev = 0.0f64;
    let mut monotone = true;
    let mut rows = Vec::with_capacity(points.len());
    for (i, pt) in points.iter().enumerate() {
        let want_c = (PI * s.spin() * pt.alpha).sin().abs();
        c_dev = c_dev.max((pt.concurrence - want_c).abs());
        e_dev = e_dev.max((pt.entropy_bits - binary_entropy(want_c)).abs());
        let branch = C64::from_polar(1.0, -PI * pt.alpha * f64::from(two_s));
        let half = C64::new(0.5, 0.0);
        let want_amp = [half, half, half, half * branch];
        for (got, want) in pt.amplitudes.iter().zip(want_amp) {
            amp_dev = amp_dev.max((got - want).norm());
        }
        if i > 0 && pt.concurrence < points[i - 1].concurrence - 1e-12 {
            monotone = false;
        }
        rows.push(vec![
            cell(pt.alpha),
            cell(pt.concurrence),
            cell(pt.entropy_bits),
            cell(want_c),
            cell(pt.branch_phase.re),
            cell(pt.branch_phase.im),
        ]);
    }
    checks.metric("points", points.len() as f64);
    checks.below("concurrence.max_deviation", c_dev, "concurrence");
    checks.below("entropy.max_deviation", e_dev, "entropy");
    checks.below("amplitude.max_deviation", amp_dev, "amplitude");
    if let Some(last) = points.last() {
        checks.metric("alpha_max", last.alpha);
        checks.metric("concurrence.at_alpha_max", last.concurrence);
        checks.metric("entropy_bits.at_alpha_max", last.entropy_bits);
    }
    if two_s == 1 {
        checks.require("concurrence.monotone", monotone);
    }
    let echo = Parameters {
        two_s: Some(two_s),
        alphas: Some(grid_spec),
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, Some(two_s)),
        envelope: checks.finish(command, seed, echo),
        table: Some(Table {
            header: vec![
                "alpha",
                "concurrence",
                "entropy_bits",
                "expected_concurrence",
                "branch_phase_re",
                "branch_phase_im",
            ],
            rows,
        }),
    })
}

fn correlator_check(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::CorrelatorCheck;
    p.only(command, &["two_s"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let spins = spin_list(p.two_s, &[0, 1, 2, 3, 4])?;
    let table = correlator_table(&spins, &[-1, 1])?;

    let mut rows = Vec::with_capacity(table.len());
    let mut consistent = 0usize;
    for r in &table {
        let prefix = format!("2s{}.sign{:+}", r.spin.two_s(), r.sign);
        let ok = r.verdict == ChainVerdict::Consistent;
        consistent += usize::from(ok);
        checks.below(
            format!("{prefix}.vacuum_residual"),
            r.vacuum_residual,
            "residual",
        );
        checks.below(
            format!("{prefix}.mode_residual"),
            r.mode_residual,
            "residual",
        );
        checks.below(
            format!("{prefix}.chain_residual"),
            r.chain_residual,
            "residual",
        );
        checks.below(
            format!("{prefix}.oracle_residual"),
            r.oracle_residual,
            "residual",
        );
        checks.metric(format!("{prefix}.exchange_factor"), r.exchange_factor);
        checks.metric(format!("{prefix}.reorder_sign"), r.reorder_sign);
        checks.metric(format!("{prefix}.closure_residual"), r.closure_residual);
        checks.metric(format!("{prefix}.consistent"), if ok { 1.0 } else { 0.0 });
        checks.require(
            format!("{prefix}.verdict_matches_spin"),
            ok == (r.sign == r.spin.exchange_sign()),
        );
        rows.push(vec![
            r.spin.two_s().to_string(),
            r.sign.to_string(),
            r.verdict.name().to_string(),
            cell(r.exchange_factor.re),
            cell(r.exchange_factor.im),
            cell(r.reorder_sign.re),
            cell(r.closure_residual),
            cell(r.chain_residual),
        ]);
    }
    checks.metric("cases", table.len() as f64);
    checks.metric("consistent_cases", consistent as f64);
    let echo = Parameters {
        two_s: p.two_s,
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, p.two_s),
        envelope: checks.finish(command, seed, echo),
        table: Some(Table {
            header: vec![
                "two_s",
                "sign",
                "verdict",
                "exchange_factor_re",
                "exchange_factor_im",
                "reorder_sign",
                "closure_residual",
                "chain_residual",
            ],
            rows,
        }),
    })
}

fn gravito_check(p: &Parameters, seed: u64) -> CliResult<Outcome> {
    let command = Command::GravitoCheck;
    p.only(command, &["omega", "grid_h", "dt"])?;
    let mut checks = Checks::new(command, &p.tolerances)?;
    let omegas: Vec<[f64; 3]> = match p.omega {
        Some(w) => vec![w],
        None => DEFAULT_OMEGAS.to_vec(),
    };
    let grid_h = p.grid_h.unwrap_or(1e-3);
    let dt = p.dt.unwrap_or(1e-3);
    if !(1e-6..=0.1).contains(&dt) {
        return Err(CliError::usage(format!(
            "--dt must lie in [1e-6, 0.1], got {dt}"
        )));
    }

    for (i, w) in omegas.iter().enumerate() {
        let r = gravito_curl_check(&Vec3::from(*w), grid_h, seed)?;
        checks.below(
            format!("curl.omega{i}.rel_deviation"),
            r.max_rel_deviation,
            "curl",
        );
    }

    let n = (1.0 / dt).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let sine: Vec<Vec3> = times
        .iter()
        .map(|&t| Vec3::new(0.0, 0.0, t.sin()))
        .collect();
    let e = gravito_efield_check(&sine, dt)?;
    let sine_err = e
        .field
        .iter()
        .zip(&times)
        .map(|(f, &t)| (f - Vec3::new(0.0, 0.0, -t.cos())).norm())
        .fold(0.0, f64::max);
    checks.metric("efield.samples", n as f64);
    checks.metric("efield.sine.at_zero_z", e.field[0].z);
    checks.below("efield.sine.max_error", sine_err, "efield");

    let affine: Vec<Vec3> = times.iter().map(|&t| Vec3::new(t, 0.0, 0.0)).collect();
    let e = gravito_efield_check(&affine, dt)?;
    let affine_err = e
        .field
        .iter()
        .map(|f| (f - Vec3::new(-1.0, 0.0, 0.0)).norm())
        .fold(0.0, f64::max);
    checks.below("efield.affine.max_error", affine_err, "efield");

    let echo = Parameters {
        omega: p.omega,
        grid_h: Some(grid_h),
        dt: Some(dt),
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    Ok(Outcome {
        stem: stem(command, None),
        envelope: checks.finish(command, seed, echo),
        table: None,
    })
}

/// Every subcommand at its defaults, followed by a summary envelope.
/// Tolerance overrides apply to each subcommand that knows the name.
pub fn run_all(p: &Parameters, seed: u64) -> CliResult<Vec<Outcome>> {
    p.only(Command::All, &[])?;
    for key in p.tolerances.keys() {
        let known = Command::SINGLE
            .iter()
            .any(|&c| default_tolerances(c).iter().any(|(k, _)| k == key));
        if !known {
            return Err(CliError::usage(format!(
                "no subcommand has a tolerance '{key}'"
            )));
        }
    }
    let mut outcomes = Vec::new();
    for command in Command::SINGLE {
        let tolerances = p
            .tolerances
            .iter()
            .filter(|(k, _)| default_tolerances(command).iter().any(|(d, _)| d == k))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let sub = Parameters {
            tolerances,
            ..Default::default()
        };
        outcomes.push(execute(command, &sub, seed)?);
    }

    let mut summary = Checks::new(Command::All, &BTreeMap::new())?;
    for o in &outcomes {
        summary.require(format!("{}.pass", o.stem), o.envelope.pass);
        for f in &o.envelope.failed_checks {
            summary.failed.push(format!("{}: {f}", o.stem));
        }
    }
    let echo = Parameters {
        tolerances: p.tolerances.clone(),
        ..Default::default()
    };
    outcomes.push(Outcome {
        stem: "all".into(),
        envelope: summary.finish(Command::All, seed, echo),
        table: None,
    });
    Ok(outcomes)
}

pub fn run(command: Command, p: &Parameters, seed: u64) -> CliResult<Vec<Outcome>> {
    match command {
        Command::All => run_all(p, seed),
        c => Ok(vec![execute(c, p, seed)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_oracle() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interferometer_defaults() {
        let o = execute(Command::Interferometer, &Parameters::default(), 0).unwrap();
        assert!(o.envelope.pass);
        assert_eq!(o.stem, "interferometer_2s1");
        assert_eq!(o.envelope.metrics["phase"], Metric::Real(PI));
    }

    #[test]
    fn unknown_tolerance_is_usage_error() {
        let p = Parameters {
            tolerances: BTreeMap::from([("bogus".to_string(), 1.0)]),
            ..Default::default()
        };
        assert!(matches!(
            execute(Command::LlCheck, &p, 0),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(run_all(&p, 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn every_subcommand_passes_at_defaults() {
        let outcomes = run_all(&Parameters::default(), 1).unwrap();
        assert_eq!(outcomes.len(), Command::SINGLE.len() + 1);
        for o in &outcomes {
            assert!(
                o.envelope.pass,
                "{}: {:?}",
                o.stem, o.envelope.failed_checks
            );
        }
    }
}
