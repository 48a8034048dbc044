//! Subcommand implementations producing [`Report`]s.

use super::args::Params;
use super::emit::{complex_text, sig12, Column, Report, Value};
use super::CliError;
use crate::channels::{
    fixed_filter_operators, kondo_operators, FixedImpuritySpec, KondoEigenvalues, KondoImpuritySpec,
};
use crate::hilbert::Axis;
use crate::protocols::{sweep, EventTree, GridSpec, Mode, Objective, ProtocolKind, ProtocolParams, ProtocolRun};
use crate::scattering::{scalar_amplitudes, WaveNumber};

fn finite(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(CliError::input(format!("{name} must be finite"))),
        other => Ok(other),
    }
}

fn wave_number(p: &Params) -> Result<WaveNumber, CliError> {
    let k = finite("k", p.k)?.unwrap_or(1.0);
    if k <= 0.0 {
        return Err(CliError::input(format!("k must be positive (got {k})")));
    }
    WaveNumber::new(k).map_err(CliError::from)
}

fn axis(p: &Params) -> Result<Axis, CliError> {
    match &p.axis {
        None => Ok(Axis::Z),
        Some(s) => s.parse().map_err(|e| CliError::input(format!("invalid --axis: {e}"))),
    }
}

fn eigenvalues(p: &Params) -> Result<KondoEigenvalues, CliError> {
    match &p.eigenvalues {
        None => Ok(KondoEigenvalues::PAPER),
        Some(s) => s.parse().map_err(|e| CliError::input(format!("invalid --eigenvalues: {e}"))),
    }
}

fn mode(p: &Params) -> Result<Option<Mode>, CliError> {
    p.mode.as_deref().map(|s| s.parse().map_err(|e| CliError::input(format!("invalid --mode: {e}")))).transpose()
}

fn exclusive_coupling(p: &Params) -> Result<(), CliError> {
    if p.r.is_some() && p.xi.is_some() {
        return Err(CliError::input("--r and --xi are mutually exclusive"));
    }
    Ok(())
}

/// Coupling from `--r`, or from `--xi` through `r = xi * k / scale`.
fn coupling(p: &Params, k: WaveNumber, scale: f64, cmd: &str) -> Result<f64, CliError> {
    exclusive_coupling(p)?;
    match (finite("r", p.r)?, finite("xi", p.xi)?) {
        (Some(r), _) => Ok(r),
        (None, Some(xi)) => Ok(xi * k.get() / scale),
        (None, None) => Err(CliError::input(format!("{cmd} needs --r or --xi"))),
    }
}

/// Shared translation of flags into protocol parameters.
pub fn protocol_params(p: &Params) -> Result<ProtocolParams, CliError> {
    exclusive_coupling(p)?;
    let k = wave_number(p)?;
    for (name, v) in [("a", p.a), ("b", p.b)] {
        if let Some(x) = finite(name, v)? {
            if x < 0.0 {
                return Err(CliError::input(format!("{name} must be non-negative (got {x})")));
            }
        }
    }
    if let Some(a) = p.a {
        if p.b.is_none() && a > 1.0 {
            return Err(CliError::input(format!("a must not exceed 1 when b is omitted (got {a})")));
        }
    }
    if let Some(h) = finite("half-separation", p.half_separation)? {
        if h <= 0.0 {
            return Err(CliError::input(format!("half-separation must be positive (got {h})")));
        }
    }
    Ok(ProtocolParams {
        k: Some(k.get()),
        r: finite("r", p.r)?,
        xi: finite("xi", p.xi)?,
        r1: finite("r1", p.r1)?,
        r2: finite("r2", p.r2)?,
        a: p.a,
        b: p.b,
        a_phase: finite("a-phase", p.a_phase)?.unwrap_or(0.0),
        b_phase: finite("b-phase", p.b_phase)?.unwrap_or(0.0),
        half_separation: p.half_separation,
        theta: None,
        phi: None,
        axis: Some(axis(p)?),
        eigenvalues: eigenvalues(p)?,
        mode: mode(p)?,
        initial: p.initial.clone(),
    })
}

pub fn amplitudes(p: &Params) -> Result<Report, CliError> {
    let k = wave_number(p)?;
    let g = coupling(p, k, 1.0, "amplitudes")?;
    let s = scalar_amplitudes(g, k)?;
    let mut rep = Report::new(vec![Column::complex("S"), Column::complex("R"), Column::real("abs_S2")]);
    rep.push(vec![s.s.into(), s.r.into(), s.transmission_probability().into()]);
    rep.single = true;
    rep.notes.push(format!("xi = g/k = {}", sig12(s.xi)));
    Ok(rep)
}

pub fn filter(p: &Params) -> Result<Report, CliError> {
    let k = wave_number(p)?;
    let r = coupling(p, k, 2.0, "filter")?;
    let spec = FixedImpuritySpec::new(r, axis(p)?)?;
    let ops = fixed_filter_operators(&spec, k)?;
    let mut rep =
        Report::new(vec![Column::real("row"), Column::real("col"), Column::complex("T"), Column::complex("R")]);
    for i in 0..2 {
        for j in 0..2 {
            rep.push(vec![i.into(), j.into(), ops.t.get(i, j).into(), ops.r.get(i, j).into()]);
        }
    }
    let blocked = spec.blocked_channel(k);
    rep.notes.push(format!(
        "blocked channel: xi = 2r/k = {}, |S|^2 = {}",
        sig12(blocked.xi),
        sig12(blocked.transmission_probability())
    ));
    Ok(rep)
}

const EIGENSTATES: [&str; 4] = ["|00>", "|11>", "(|01>+|10>)/sqrt2", "(|01>-|10>)/sqrt2"];

pub fn kondo(p: &Params) -> Result<Report, CliError> {
    let k = wave_number(p)?;
    let r = coupling(p, k, 1.0, "kondo")?;
    let spec = KondoImpuritySpec::new(r, eigenvalues(p)?)?;
    let amps = spec.channel_amplitudes(k);
    let mut rep = Report::new(vec![
        Column::real("channel"),
        Column::text("eigenstate"),
        Column::real("lambda"),
        Column::real("xi"),
        Column::complex("S"),
        Column::complex("R"),
        Column::real("abs_S2"),
    ]);
    for (i, (a, lambda)) in amps.iter().zip(spec.eigenvalues.values()).enumerate() {
        rep.push(vec![
            (i + 1).into(),
            EIGENSTATES[i].into(),
            lambda.into(),
            a.xi.into(),
            a.s.into(),
            a.r.into(),
            a.transmission_probability().into(),
        ]);
    }
    let t = kondo_operators(&spec, k)?.t;
    let (plus, minus) = (t.get(2, 2), t.get(1, 2));
    rep.notes.push(format!("|10> -> ({})|01> + ({})|10>", complex_text(minus), complex_text(plus)));
    Ok(rep)
}

fn outcome_report(run: &ProtocolRun, extra: &[(&str, f64)]) -> Report {
    let mut cols = vec![Column::text("branch")];
    cols.extend(extra.iter().map(|(n, _)| Column::real(n)));
    cols.extend([
        Column::real("probability"),
        Column::real("conditional_probability"),
        Column::real("entropy_bits"),
        Column::real("concurrence"),
        Column::real("expected_attempts"),
    ]);
    let mut rep = Report::new(cols);
    for o in &run.outcomes {
        let mut row: Vec<Value> = vec![o.label.clone().into()];
        row.extend(extra.iter().map(|(_, v)| Value::Num(*v)));
        let attempts = o.expected_attempts();
        row.extend([
            o.probability.into(),
            o.conditional_probability.into(),
            o.entropy_bits.into(),
            o.concurrence.into(),
            attempts.is_finite().then_some(attempts).into(),
        ]);
        rep.push(row);
    }
    if let Some(res) = run.condition_residual {
        rep.notes.push(format!("balance residual | |a S1| - |b (S3+S4)/2| | = {}", sig12(res)));
    }
    rep
}

fn tree_report(tree: &EventTree) -> Report {
    let mut rep = Report::new(vec![Column::text("branch"), Column::real("probability")]);
    for b in &tree.branches {
        rep.push(vec![b.label().into(), b.probability.into()]);
    }
    rep.notes.push(format!("total probability = {}", sig12(tree.total_probability())));
    rep
}

fn finish(run: ProtocolRun, p: &Params, extra: &[(&str, f64)]) -> Report {
    if p.tree {
        tree_report(&run.tree)
    } else {
        outcome_report(&run, extra)
    }
}

pub fn concentrate(p: &Params) -> Result<Report, CliError> {
    let kind = match p.impurity.as_deref().unwrap_or("fixed") {
        "fixed" => ProtocolKind::Concentrate,
        "kondo" => ProtocolKind::ConcentrateKondo,
        other => return Err(CliError::input(format!("invalid --impurity '{other}' (fixed | kondo)"))),
    };
    let protocol = protocol_params(p)?.build(kind)?;
    let r = match &protocol {
        crate::protocols::Protocol::ConcentrateFixed { r, .. } => *r,
        crate::protocols::Protocol::ConcentrateKondo { spec, .. } => spec.r,
        _ => unreachable!("concentrate builds a concentration protocol"),
    };
    let mut rep = finish(protocol.run()?, p, &[("r", r)]);
    if p.r.is_none() && p.xi.is_none() {
        rep.notes.push(format!("r = {} (balanced coupling)", sig12(r)));
    }
    Ok(rep)
}

pub fn entangle_particles(p: &Params) -> Result<Report, CliError> {
    let protocol = protocol_params(p)?.build(ProtocolKind::EntangleParticles)?;
    Ok(finish(protocol.run()?, p, &[]))
}

pub fn entangle_impurities(p: &Params) -> Result<Report, CliError> {
    let protocol = protocol_params(p)?.build(ProtocolKind::EntangleImpurities)?;
    Ok(finish(protocol.run()?, p, &[]))
}

pub fn run_sweep(p: &Params) -> Result<Report, CliError> {
    let kind: ProtocolKind = p
        .protocol
        .as_deref()
        .ok_or_else(|| CliError::input("sweep needs --protocol"))?
        .parse()
        .map_err(|e| CliError::input(format!("invalid --protocol: {e}")))?;
    if p.grid.is_empty() {
        return Err(CliError::input("sweep needs at least one --grid"));
    }
    let grids = p
        .grid
        .iter()
        .map(|g| g.parse::<GridSpec>().map_err(|e| CliError::input(format!("invalid --grid: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let objective: Objective = match &p.objective {
        None => Objective::Entropy,
        Some(s) => s.parse().map_err(|e| CliError::input(format!("invalid --objective: {e}")))?,
    };
    let res = sweep(kind, &grids, &protocol_params(p)?, objective)?;

    let mut cols: Vec<Column> = grids.iter().map(|g| Column::real(&g.param)).collect();
    cols.extend([Column::real("probability"), Column::real("entropy_bits"), Column::real("concurrence")]);
    let mut rep = Report::new(cols);
    for rec in &res.records {
        let mut row: Vec<Value> = rec.params.iter().map(|(_, v)| Value::Num(*v)).collect();
        row.extend([rec.probability.into(), rec.entropy_bits.into(), rec.concurrence.into()]);
        rep.push(row);
    }
    if let Some(best) = res.best() {
        let at: Vec<String> = best.params.iter().map(|(n, v)| format!("{n}={}", sig12(*v))).collect();
        rep.notes.push(format!(
            "argmax {}: {} (probability {:.6}, entropy_bits {:.6})",
            objective,
            at.join(" "),
            best.probability,
            best.entropy_bits
        ));
    }
    Ok(rep)
}
