//! One function per subcommand. Each returns its table plus any property
//! violations found; violations are reported after the table is written.

use std::io::{BufRead, BufReader, Read};

use latticeperm::circuit::LatticeCircuitParams;
use latticeperm::color::{count_color_classes, region_census};
use latticeperm::mixing::{
    mc_tv_estimate, CircuitStateSampler, IdealizedSampler, Labeler, StateSampler, UniformDistinctSampler,
};
use latticeperm::walk::{
    check_operator_identities, dense_spectral_norm, spectral_norm_diff, OperatorKind, PowerOptions, StateSpace,
    DENSE_ORACLE_BITS,
};
use latticeperm::{
    build_lattice_circuit, exact_tv_trajectory, predicted_depth, BitLatticeTuple, LatticeShape, RegionLabel, RngSeed,
    DEFAULT_ENUMERATION_BITS,
};
use rand::Rng;

use crate::config::{Command, ExperimentConfig, Source};
use crate::output::{Cell, Table};
use crate::CliError;

pub struct Outcome {
    pub table: Table,
    pub violations: Vec<String>,
}

impl Outcome {
    fn clean(table: Table) -> Self {
        Outcome {
            table,
            violations: Vec::new(),
        }
    }
}

pub fn run(config: &ExperimentConfig, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match config.subcommand {
        Command::Census => census(config),
        Command::Spectral => spectral(config),
        Command::Mixing => mixing(config),
        Command::Depth => depth(config),
        Command::Simulate => simulate(config, stdin),
    }
}

fn shape(c: &ExperimentConfig) -> Result<LatticeShape, CliError> {
    Ok(LatticeShape::new(c.dims, c.side, c.k)?)
}

fn census(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let shape = shape(c)?;
    let census = region_census(&shape, DEFAULT_ENUMERATION_BITS)?;
    let classes = count_color_classes(&shape)?;
    let mut table = Table::new(&[
        "dims",
        "side",
        "k",
        "safe",
        "coll",
        "ident",
        "distinct",
        "coll_ratio",
        "collision_bound",
        "color_classes",
        "color_class_bound",
        "strategy",
    ]);
    let strategy = serde_json::to_value(census.strategy).expect("strategy serializes");
    table.push(vec![
        c.dims.into(),
        c.side.into(),
        c.k.into(),
        census.safe.into(),
        census.coll.into(),
        census.ident.into(),
        census.distinct.into(),
        census.coll_ratio().into(),
        census.collision_bound().into(),
        classes.exact.into(),
        classes.bound.into(),
        strategy.as_str().unwrap_or_default().into(),
    ]);
    let mut violations = Vec::new();
    if !census.bound_holds() {
        violations.push(format!(
            "collision fraction {} exceeds bound {}",
            census.coll_ratio(),
            census.collision_bound()
        ));
    }
    if !classes.bound_holds() {
        violations.push(format!(
            "{} color classes exceed bound {}",
            classes.exact, classes.bound
        ));
    }
    Ok(Outcome { table, violations })
}

fn spectral(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let space = StateSpace::new(shape(c)?)?;
    let t = c.t.unwrap_or(1);
    let identities = check_operator_identities(&space)?;
    let seq = OperatorKind::mixing_sequence(t);
    let opts = PowerOptions {
        seed: RngSeed::new(c.seed),
        ..PowerOptions::default()
    };
    let est = spectral_norm_diff(&space, &seq, &opts)?;
    let oracle = if space.shape().bits() <= DENSE_ORACLE_BITS as usize {
        Some(dense_spectral_norm(&space, &seq)?)
    } else {
        None
    };
    let mut table = Table::new(&[
        "dims",
        "side",
        "k",
        "t",
        "norm",
        "iterations",
        "oracle_norm",
        "oracle_delta",
        "identity_checks",
        "identity_max_residual",
    ]);
    table.push(vec![
        c.dims.into(),
        c.side.into(),
        c.k.into(),
        t.into(),
        est.norm.into(),
        est.iterations.into(),
        oracle.into(),
        oracle.map(|o| (est.norm - o).abs()).into(),
        identities.records.len().into(),
        identities.max_residual().into(),
    ]);
    Ok(Outcome::clean(table))
}

/// The first safe tuple in packed order, or a random one when the state
/// space is too large to scan.
fn default_start(shape: &LatticeShape, seed: RngSeed) -> Result<u64, CliError> {
    let labeler = Labeler::new(shape)?;
    if shape.bits() <= DEFAULT_ENUMERATION_BITS as usize {
        let states = 1u64 << shape.bits();
        let found = (0..states)
            .find(|&s| labeler.label(s) == RegionLabel::Safe)
            .or_else(|| (0..states).find(|&s| labeler.label(s) != RegionLabel::Ident));
        return found.ok_or_else(|| CliError::Usage(format!("no distinct tuples exist for {shape}")));
    }
    let mask = if shape.bits() >= 64 {
        u64::MAX
    } else {
        (1u64 << shape.bits()) - 1
    };
    let mut rng = seed.rng();
    (0..1_000_000)
        .map(|_| rng.gen::<u64>() & mask)
        .find(|&s| labeler.label(s) == RegionLabel::Safe)
        .ok_or_else(|| CliError::Usage(format!("no safe start found for {shape}; pass --start")))
}

const MIXING_COLUMNS: &[&str] = &["t", "source", "start", "tv", "bias", "sigma", "samples", "low_samples"];

fn mixing(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let shape = shape(c)?;
    let root = RngSeed::new(c.seed);
    let start = match c.start {
        Some(s) => s,
        None => default_start(&shape, root.child(u64::MAX))?,
    };
    let mut table = Table::new(MIXING_COLUMNS);
    let mut violations = Vec::new();
    if c.source == Source::Exact {
        let space = StateSpace::new(shape)?;
        let tr = exact_tv_trajectory(&space, start, c.t_max)?;
        for p in &tr.points {
            table.push(vec![
                p.t.into(),
                "exact".into(),
                start.into(),
                p.tv.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
        }
        if !tr.is_nonincreasing(1e-12) {
            violations.push(format!("exact TV from state {start} increases along the trajectory"));
        }
        return Ok(Outcome { table, violations });
    }
    for t in 0..=c.t_max {
        let sampler: Box<dyn StateSampler> = match c.source {
            Source::Idealized => Box::new(IdealizedSampler::mixing(shape, t)?),
            Source::Circuit => {
                let params = LatticeCircuitParams::new(c.dims, c.side, t, c.base_layers)?;
                Box::new(CircuitStateSampler::new(params, c.k)?)
            }
            Source::Uniform => Box::new(UniformDistinctSampler::new(shape)?),
            Source::Exact => unreachable!("handled above"),
        };
        let est = mc_tv_estimate(sampler.as_ref(), start, c.samples, root.child(t as u64))?;
        table.push(vec![
            t.into(),
            est.source.into(),
            start.into(),
            est.tv.into(),
            est.bias.into(),
            est.sigma.into(),
            est.samples.into(),
            est.low_samples.into(),
        ]);
    }
    Ok(Outcome::clean(table))
}

fn depth(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(&[
        "dims",
        "side",
        "t",
        "base_layers",
        "constructed_depth",
        "predicted_depth",
    ]);
    let mut violations = Vec::new();
    for t in c.t_values() {
        let params = LatticeCircuitParams::new(c.dims, c.side, t, c.base_layers)?;
        let circuit = build_lattice_circuit(&params, RngSeed::new(c.seed).child(t as u64))?;
        let predicted = predicted_depth(c.dims, t, c.base_layers)?;
        let built = circuit.depth();
        if built != predicted || circuit.compile().depth() as u64 != predicted {
            violations.push(format!("t={t}: constructed depth {built} but predicted {predicted}"));
        }
        table.push(vec![
            c.dims.into(),
            c.side.into(),
            t.into(),
            c.base_layers.into(),
            built.into(),
            predicted.into(),
        ]);
    }
    Ok(Outcome { table, violations })
}

fn simulate(c: &ExperimentConfig, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let params = LatticeCircuitParams::new(c.dims, c.side, c.t.unwrap_or(1), c.base_layers)?;
    let mut circuit = build_lattice_circuit(&params, RngSeed::new(c.seed))?;
    if c.invert {
        circuit = circuit.invert();
    }
    let compiled = circuit.compile();
    let reader: Box<dyn BufRead> = match &c.input {
        Some(path) => Box::new(BufReader::new(std::fs::File::open(path)?)),
        None => Box::new(BufReader::new(stdin)),
    };
    let mut table = Table::new(&["state"]);
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "state" {
            continue;
        }
        let x = BitLatticeTuple::parse_line((c.dims, c.side), line)
            .map_err(|e| CliError::Usage(format!("input line {}: {e}", number + 1)))?;
        table.push(vec![compiled.apply_tuple(&x)?.to_line().into()]);
    }
    Ok(Outcome::clean(table))
}
