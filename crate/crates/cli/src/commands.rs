use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spinref_core::analysis::{
    backward_orbit, delta_of, entropy_cap, forward_orbit, low_region_bound, orbit_csv, phase1_overhead,
    phase2_region_floor, phase3_certify, region_floor_at_worst, yield_ledger, LossFactors, Phase1Overhead,
    Phase2Region, Phase3Certificate,
};
use spinref_core::compiler::{
    compile_phase1, compile_phase2_round, compile_phase3_round, equivalence_check, equivalence_check_with, CheckMode,
    EquivalenceReport,
};
use spinref_core::cooling::{
    pair_survivors, parity_bin, phase1_run, phase2_plan, phase2_run, phase3_block_passes, phase3_run, pipeline as run_pipeline,
    records_to_csv, Phase1Config, Phase2Step, PipelineConfig, PipelineMode, PipelineReport, RoundRecord,
    PHASE2_ENTRY_DELTA,
};
use spinref_core::polymer::{
    induced_permutation, pulses_from_text, realize_abstract_shift, single_tape_shift_seq, track_decomposition,
    transposition_as_cnots, two_tape_rotate_seq, PolymerSpec, Pulse,
};
use spinref_core::runtime::{default_sizes, scaling, Architecture, ScalingFit};
use spinref_core::thermal::sample;
use spinref_core::Permutation;

use crate::config::{Common, ExperimentConfig, Format};
use crate::Failure;

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn trial_pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Invalid(e.to_string()))
}

#[derive(Debug, Serialize)]
struct TrialSummary {
    seed: u64,
    clean_bits: u64,
    ones_in_output: u64,
    entropy_cap: f64,
    expected_floor: f64,
    meets_floor: bool,
    rounds: usize,
    steps: u64,
}

impl From<&PipelineReport> for TrialSummary {
    fn from(r: &PipelineReport) -> Self {
        TrialSummary {
            seed: r.seed,
            clean_bits: r.clean_bits,
            ones_in_output: r.ones_in_output,
            entropy_cap: r.ledger.entropy_cap,
            expected_floor: r.ledger.expected_floor,
            meets_floor: r.ledger.meets_floor,
            rounds: r.records.len(),
            steps: r.steps.total,
        }
    }
}

#[derive(Debug, Serialize)]
struct PipelineSummary<'a> {
    config: &'a ExperimentConfig,
    mode: PipelineMode,
    trials: Vec<TrialSummary>,
    min_clean_bits: u64,
    max_clean_bits: u64,
    mean_clean_bits: f64,
    all_clean: bool,
    all_within_cap: bool,
    all_meet_floor: bool,
}

pub fn pipeline(flags: &Common, mode: PipelineMode) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("pipeline", flags)?;
    if cfg.n < 8 {
        return Err(Failure::Invalid(format!("pipeline needs at least 8 bits, got {}", cfg.n)));
    }
    let model = cfg.model();
    let pconf = PipelineConfig {
        mode,
        phase1: Phase1Config { target_bias: cfg.target_bias, rounds: None },
        schedule: cfg.schedule(),
    };
    let seeds = cfg.seeds();
    let reports: Vec<_> = trial_pool(cfg.jobs)?.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let r = run_pipeline(&model, cfg.n, seed, &pconf)?;
                let files = cfg.out.as_ref().map(|_| (records_to_csv(&r.records), json(&r.ledger)));
                Ok((TrialSummary::from(&r), files))
            })
            .collect::<Result<_, spinref_core::Error>>()
    })?;

    let mut trials = Vec::with_capacity(reports.len());
    for (t, files) in reports {
        if let (Some(dir), Some((csv, ledger))) = (&cfg.out, files) {
            write(dir, &format!("rounds_seed{}.csv", t.seed), &csv)?;
            write(dir, &format!("ledger_seed{}.json", t.seed), &ledger)?;
        }
        trials.push(t);
    }
    let clean: Vec<u64> = trials.iter().map(|t| t.clean_bits).collect();
    let summary = PipelineSummary {
        config: &cfg,
        mode,
        min_clean_bits: clean.iter().copied().min().unwrap_or(0),
        max_clean_bits: clean.iter().copied().max().unwrap_or(0),
        mean_clean_bits: clean.iter().sum::<u64>() as f64 / clean.len() as f64,
        all_clean: trials.iter().all(|t| t.ones_in_output == 0),
        all_within_cap: trials.iter().all(|t| t.clean_bits as f64 <= t.entropy_cap),
        all_meet_floor: trials.iter().all(|t| t.meets_floor),
        trials,
    };
    if let Some(dir) = &cfg.out {
        write(dir, "summary.json", &json(&summary))?;
    }
    match cfg.format {
        Format::Json => print!("{}", json(&summary)),
        Format::Csv => {
            println!("seed,clean_bits,ones_in_output,entropy_cap,expected_floor,meets_floor,rounds,steps");
            for t in &summary.trials {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    t.seed, t.clean_bits, t.ones_in_output, t.entropy_cap, t.expected_floor, t.meets_floor, t.rounds, t.steps
                );
            }
        }
    }
    if !summary.all_clean {
        return Err(Failure::Check("a trial returned 1s in its clean prefix".into()));
    }
    if !summary.all_within_cap {
        return Err(Failure::Check("a trial exceeded the entropy cap".into()));
    }
    Ok(())
}

fn emit_records(cfg: &ExperimentConfig, records: &[RoundRecord]) -> Result<(), Failure> {
    let csv = records_to_csv(records);
    if let Some(dir) = &cfg.out {
        write(dir, &format!("rounds_seed{}.csv", cfg.seed), &csv)?;
    }
    match cfg.format {
        Format::Csv => print!("{csv}"),
        Format::Json => print!("{}", json(&records)),
    }
    Ok(())
}

pub fn phase(which: u8, flags: &Common) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("phase", flags)?;
    if cfg.trials != 1 {
        return Err(Failure::Invalid("phase runs a single trial; use pipeline for batches".into()));
    }
    let bits = sample(&cfg.model(), cfg.n, cfg.seed)?;
    let delta = delta_of(cfg.epsilon);
    let (_, records) = match which {
        1 => phase1_run(bits, cfg.epsilon, &Phase1Config { target_bias: cfg.target_bias, rounds: None })?,
        2 => {
            if delta > PHASE2_ENTRY_DELTA + 1e-9 {
                return Err(Failure::Invalid(format!("phase 2 needs epsilon >= 0.856, got {}", cfg.epsilon)));
            }
            phase2_run(bits, delta, cfg.n, &cfg.schedule(), cfg.seed)?
        }
        _ => {
            if cfg.n < 4 {
                return Err(Failure::Invalid("phase 3 needs at least 4 bits".into()));
            }
            phase3_run(bits, delta, cfg.n)?
        }
    };
    emit_records(&cfg, &records)
}

#[derive(Debug, Serialize)]
struct Phase1Analysis {
    rounds: usize,
    forward_orbit: Vec<f64>,
    backward_from_target: Vec<f64>,
    overhead: Phase1Overhead,
    low_region_bound: f64,
}

#[derive(Debug, Serialize)]
struct Phase2Analysis {
    entry_delta: f64,
    region_floors: Vec<f64>,
    worst_case_floors: Vec<f64>,
    plan: Vec<Phase2Step>,
}

#[derive(Debug, Serialize)]
struct Analysis<'a> {
    config: &'a ExperimentConfig,
    phase1: Phase1Analysis,
    phase2: Phase2Analysis,
    phase3: Option<Phase3Certificate>,
    loss_factors: LossFactors,
    constant_product: f64,
    total_factor: f64,
    expected_floor: f64,
    entropy_cap: f64,
}

pub fn analyze(flags: &Common) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("analyze", flags)?;
    let orbit = forward_orbit(cfg.epsilon, cfg.target_bias)?;
    let rounds = orbit.len() - 1;
    let entry = delta_of(*orbit.last().unwrap()).min(PHASE2_ENTRY_DELTA);
    let regions = [Phase2Region::First, Phase2Region::Second, Phase2Region::Third, Phase2Region::Fourth];
    let ledger = yield_ledger(cfg.epsilon, cfg.n as u64, 0);
    let report = Analysis {
        config: &cfg,
        phase1: Phase1Analysis {
            rounds,
            backward_from_target: backward_orbit(cfg.target_bias, rounds)?,
            overhead: phase1_overhead(cfg.epsilon, cfg.target_bias)?,
            low_region_bound: low_region_bound(),
            forward_orbit: orbit,
        },
        phase2: Phase2Analysis {
            entry_delta: entry,
            region_floors: regions.iter().map(|&r| phase2_region_floor(r)).collect(),
            worst_case_floors: regions.iter().filter_map(|&r| region_floor_at_worst(r)).collect(),
            plan: if entry > 0.0 && cfg.n >= 2 { phase2_plan(entry, cfg.n, &cfg.schedule())? } else { Vec::new() },
        },
        phase3: if cfg.n >= 64 { Some(phase3_certify(cfg.n as f64, 6)?) } else { None },
        loss_factors: ledger.factors.clone(),
        constant_product: ledger.constant_product,
        total_factor: ledger.total_factor,
        expected_floor: ledger.expected_floor,
        entropy_cap: entropy_cap(cfg.n as f64, cfg.epsilon),
    };
    let text = match cfg.format {
        Format::Json => json(&report),
        Format::Csv => orbit_csv("epsilon", &report.phase1.forward_orbit),
    };
    if let Some(dir) = &cfg.out {
        write(dir, "analysis.json", &json(&report))?;
    }
    print!("{text}");
    Ok(())
}

fn label(spec: &PolymerSpec, pos: usize) -> String {
    format!("{}{}", spec.atom(pos), pos / spec.pattern.len())
}

/// `X -> Y+d` when every atom of type X lands on type Y, `d` periods on.
fn type_maps(spec: &PolymerSpec, perm: &Permutation) -> BTreeMap<String, Option<String>> {
    let p = spec.pattern.len();
    let periods = spec.periods as i64;
    spec.pattern
        .iter()
        .map(|&x| {
            let moves: Vec<(char, i64)> = (0..spec.periods)
                .map(|j| {
                    let to = perm.image(spec.position(x, j).unwrap());
                    let dj = ((to / p) as i64 - j as i64).rem_euclid(periods);
                    (spec.atom(to), if dj > periods / 2 { dj - periods } else { dj })
                })
                .collect();
            let uniform = moves.windows(2).all(|w| w[0] == w[1]);
            let text = uniform.then(|| {
                let (y, d) = moves[0];
                if d == 0 { format!("{y}") } else { format!("{y}{d:+}") }
            });
            (x.to_string(), text)
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct ShiftSummary {
    pulses: Vec<String>,
    logical: Vec<String>,
    full_cycle: bool,
}

#[derive(Debug, Serialize)]
struct ArchReport {
    pattern: String,
    periods: usize,
    sequence: Vec<String>,
    cnot_expansion: Vec<Vec<String>>,
    type_maps: BTreeMap<String, Option<String>>,
    fixed_types: Vec<String>,
    tracks: Vec<Vec<String>>,
    realized_shift: Option<ShiftSummary>,
}

pub fn arch(pattern: &str, periods: usize, seq: Option<&str>, d_site: Option<usize>, flags: &Common) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("arch", flags)?;
    let mut spec = PolymerSpec::new(pattern, periods)?;
    let abc = spec.pattern == ['A', 'B', 'C'];
    if abc || d_site.is_some() {
        spec = spec.with_d_site(d_site.unwrap_or(0))?;
    }
    let pulses: Vec<Pulse> = match seq {
        Some(text) => pulses_from_text(&text.replace(';', "\n"))?,
        None if spec.pattern == ['A', 'B', 'C', 'D'] => two_tape_rotate_seq(),
        None if abc => single_tape_shift_seq(),
        None => return Err(Failure::Invalid(format!("no default sequence for pattern {pattern}; pass --seq"))),
    };
    let perm = induced_permutation(&spec, &pulses)?;
    let maps = type_maps(&spec, &perm);
    let fixed_types = maps.iter().filter(|(x, m)| m.as_deref() == Some(x.as_str())).map(|(x, _)| x.clone()).collect();
    let realized_shift = if abc {
        let r = realize_abstract_shift(&spec)?;
        Some(ShiftSummary {
            pulses: r.pulses.iter().map(ToString::to_string).collect(),
            logical: r.logical.iter().map(|&i| label(&spec, i)).collect(),
            full_cycle: track_decomposition(&r.permutation).len() == 1,
        })
    } else {
        None
    };
    let report = ArchReport {
        pattern: pattern.to_string(),
        periods,
        sequence: pulses.iter().map(ToString::to_string).collect(),
        cnot_expansion: pulses
            .iter()
            .filter_map(|p| match *p {
                Pulse::Pair(x, y) => Some(transposition_as_cnots(x, y).iter().map(ToString::to_string).collect()),
                _ => None,
            })
            .collect(),
        type_maps: maps,
        fixed_types,
        tracks: track_decomposition(&perm).iter().map(|c| c.iter().map(|&i| label(&spec, i)).collect()).collect(),
        realized_shift,
    };
    let text = match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("from,to\n");
            for i in 0..spec.ring_len() {
                s.push_str(&format!("{},{}\n", label(&spec, i), label(&spec, perm.image(i))));
            }
            s
        }
    };
    if let Some(dir) = &cfg.out {
        write(dir, "arch.json", &json(&report))?;
    }
    print!("{text}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct NamedReport {
    name: String,
    #[serde(flatten)]
    report: EquivalenceReport,
}

fn phase2_ref(k: usize) -> impl Fn(&[bool]) -> Vec<bool> {
    move |b| b.chunks_exact(k).filter_map(parity_bin).flatten().copied().collect()
}

fn check_one(phase: u8, width: usize, k: usize) -> Result<NamedReport, Failure> {
    let (name, report) = match phase {
        1 => (format!("phase1 n={width}"), equivalence_check(&compile_phase1(width)?, pair_survivors, width)),
        2 => (format!("phase2 n={width} k={k}"), equivalence_check(&compile_phase2_round(width, k)?, phase2_ref(k), width)),
        _ => {
            let mode = if width <= 16 { CheckMode::Exhaustive } else { CheckMode::Sampled { cases: 1000, seed: 0 } };
            let oracle = move |b: &[bool]| -> Vec<bool> {
                b.chunks_exact(k).filter(|c| phase3_block_passes(c)).flat_map(|c| c[3..].to_vec()).collect()
            };
            // The compiled decision writes into each block's third cell, so
            // the check covers inputs where that cell starts clear.
            let report = equivalence_check_with(&compile_phase3_round(width, k)?, oracle, width, mode, |b| {
                b.chunks_exact(k).all(|c| !c[2])
            });
            (format!("phase3 n={width} k={k} (third cells clear)"), report)
        }
    };
    Ok(NamedReport { name, report })
}

pub fn equiv(phase: Option<u8>, width: Option<usize>, k: Option<usize>, flags: &Common) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("equiv", flags)?;
    let cases: Vec<(u8, usize, usize)> = match phase {
        Some(p) => {
            let k = k.unwrap_or(match p {
                1 => 2,
                2 => 3,
                _ => 4,
            });
            vec![(p, width.unwrap_or(12), k)]
        }
        None => vec![(1, 8, 2), (1, 64, 2), (2, 12, 3), (2, 14, 7), (3, 8, 4), (3, 16, 8)],
    };
    let reports = cases.into_iter().map(|(p, w, k)| check_one(p, w, k)).collect::<Result<Vec<_>, _>>()?;
    let text = match cfg.format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut s = String::from("name,mode,cases,mismatches,witness\n");
            for r in &reports {
                let w = r.report.witness.clone().unwrap_or_default();
                s.push_str(&format!("{},{},{},{},{}\n", r.name, r.report.mode, r.report.cases, r.report.mismatches, w));
            }
            s
        }
    };
    if let Some(dir) = &cfg.out {
        write(dir, "equiv.json", &json(&reports))?;
    }
    print!("{text}");
    match reports.iter().find(|r| !r.report.agrees()) {
        Some(r) => Err(Failure::Check(format!("{} disagrees on input {}", r.name, r.report.witness.as_deref().unwrap_or("?")))),
        None => Ok(()),
    }
}

pub fn bench(arch: Option<&str>, sizes: Option<Vec<usize>>, flags: &Common) -> Result<(), Failure> {
    let cfg = ExperimentConfig::resolve("bench", flags)?;
    let archs = match arch {
        Some(a) => vec![a.parse::<Architecture>()?],
        None => Architecture::ALL.to_vec(),
    };
    let sizes = sizes.unwrap_or_else(default_sizes);
    if sizes.iter().any(|&n| n < 8) {
        return Err(Failure::Invalid("bench sizes must be at least 8".into()));
    }
    let model = cfg.model();
    let fits: Vec<ScalingFit> = trial_pool(cfg.jobs)?
        .install(|| archs.par_iter().map(|&a| scaling(a, &model, &sizes, cfg.seed)).collect::<Result<_, _>>())?;
    let text = match cfg.format {
        Format::Json => json(&fits),
        Format::Csv => {
            let mut s = String::from("arch,n,steps,slope\n");
            for f in &fits {
                for (n, steps) in f.sizes.iter().zip(&f.steps) {
                    s.push_str(&format!("{},{},{},{:.4}\n", f.arch, n, steps, f.slope));
                }
            }
            s
        }
    };
    if let Some(dir) = &cfg.out {
        write(dir, "bench.json", &json(&fits))?;
    }
    print!("{text}");
    Ok(())
}
