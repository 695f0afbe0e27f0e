use spinref_core::analysis::{bias_forward, entropy_cap, phase2_exact, phase3_exact};
use spinref_core::cooling::{
    phase2_plan, pipeline, PipelineConfig, PipelineMode, Phase2Schedule, RoundRecord, Shuffle,
};
use spinref_core::thermal::{block_stride_perm, gather_permutation, permutation_cost, sample, BiasModel};
use spinref_core::icbrt;

fn direct() -> PipelineConfig {
    PipelineConfig::default()
}

#[test]
fn runs_are_deterministic() {
    let model = BiasModel::binomial(0.3);
    for config in [direct(), PipelineConfig { mode: PipelineMode::ShuffledBlocks(Shuffle::Uniform), ..direct() }] {
        let a = pipeline(&model, 50_000, 11, &config).unwrap();
        let b = pipeline(&model, 50_000, 11, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
    let c = pipeline(&model, 50_000, 12, &direct()).unwrap();
    assert_ne!(c.output.len() as u64 + c.records[0].ones_in, 0);
}

/// Ones among survivors predicted from the round's own input.
fn predicted_delta(r: &RoundRecord, k: Option<usize>) -> f64 {
    let d_in = r.ones_in as f64 / r.n_in as f64;
    match (r.phase, k) {
        (1, _) => (1.0 - bias_forward(1.0 - 2.0 * d_in)) / 2.0,
        (2, Some(k)) => phase2_exact(d_in, k).delta_out,
        (3, Some(k)) => phase3_exact(d_in, k).delta_out,
        _ => unreachable!(),
    }
}

#[test]
fn rounds_conform_within_three_sigma() {
    let n = 1_000_000;
    for seed in 0..4 {
        let rep = pipeline(&BiasModel::binomial(0.25), n, seed, &direct()).unwrap();
        let mut p2 = rep.plan.phase2.iter();
        for r in &rep.records {
            let k = match r.phase {
                2 => Some(p2.next().unwrap().k),
                3 => Some(rep.plan.phase3_k),
                _ => None,
            };
            let d = predicted_delta(r, k);
            let mean = r.n_out as f64 * d;
            let sigma = (r.n_out as f64 * d * (1.0 - d)).sqrt();
            assert!((r.ones_out as f64 - mean).abs() <= 3.0 * sigma + 1e-9, "seed {seed} {r:?} mean {mean} sigma {sigma}");
        }
    }
}

#[test]
fn cleanliness_never_gets_worse() {
    for seed in 0..5 {
        let rep = pipeline(&BiasModel::binomial(0.2), 400_000, seed, &direct()).unwrap();
        for r in &rep.records {
            let (fin, fout) = (r.ones_in as f64 / r.n_in as f64, r.ones_out as f64 / r.n_out.max(1) as f64);
            // Three binomial standard deviations on the output fraction.
            let slack = 3.0 * (fin * (1.0 - fin) / r.n_out.max(1) as f64).sqrt();
            assert!(fout <= fin + slack, "seed {seed} {r:?}");
            assert!(r.n_out <= r.n_in && r.ones_out <= r.ones_in);
        }
    }
}

#[test]
fn clean_output_and_entropy_cap() {
    let rep = pipeline(&BiasModel::binomial(0.25), 1_000_000, 5, &direct()).unwrap();
    assert_eq!(rep.ones_in_output, 0);
    assert!(rep.clean_bits >= 3125);
    assert!((rep.clean_bits as f64) <= entropy_cap(1e6, 0.25));
    assert!(rep.ledger.consistency_gap() < 0.05);
}

#[test]
fn phase1_conserves_bits() {
    let rep = pipeline(&BiasModel::binomial(0.4), 100_000, 3, &direct()).unwrap();
    let mut prev_out = None;
    for r in rep.records.iter().filter(|r| r.phase == 1) {
        if let Some(p) = prev_out {
            assert_eq!(r.n_in, p);
        }
        // Each pair keeps at most one bit.
        assert!(2 * r.n_out <= r.n_in);
        prev_out = Some(r.n_out);
    }
}

#[test]
fn phase2_rounds_grow_like_log_log() {
    let mut worst: f64 = 0.0;
    for e in 6..=12 {
        let n = 3usize.pow(e);
        let rounds = phase2_plan(0.072, n, &Phase2Schedule::default()).unwrap().len() as f64;
        let ll = (n as f64).ln().ln();
        worst = worst.max(rounds / ll);
    }
    eprintln!("phase-2 rounds / ln ln n at most {worst:.3}");
    assert!(worst <= 3.0);
}

#[test]
fn gather_is_at_most_quadratic() {
    for n in [27usize, 64, 125, 216, 343, 512, 729] {
        let b = icbrt(n);
        let segments: Vec<_> = (0..n / b).map(|i| (i * b, (i * 7 + 3) % (b + 1))).collect();
        let cost = permutation_cost(&gather_permutation(n, &segments).unwrap()).steps as f64;
        assert!(cost <= 2.0 * (n * n) as f64, "n={n} cost={cost}");
    }
}

/// Weight histogram of all 8-bit windows that stay inside one block.
fn window_weights(bits: &[bool], block: usize) -> [f64; 9] {
    let mut h = [0u64; 9];
    for blk in bits.chunks(block) {
        for w in blk.windows(8) {
            h[w.iter().filter(|&&b| b).count()] += 1;
        }
    }
    let total: u64 = h.iter().sum();
    h.map(|c| c as f64 / total as f64)
}

fn binomial_weights(p1: f64) -> [f64; 9] {
    let mut out = [0.0; 9];
    let mut choose = 1.0;
    for (w, o) in out.iter_mut().enumerate() {
        *o = choose * p1.powi(w as i32) * (1.0 - p1).powi(8 - w as i32);
        choose = choose * (8 - w) as f64 / (w + 1) as f64;
    }
    out
}

#[test]
fn stride_shuffle_decorrelates_markov_blocks() {
    let n = 1_000_000;
    let model = BiasModel::markov(0.25, 10);
    let raw = sample(&model, n, 9).unwrap();
    let b = icbrt(n);
    let shuffled = block_stride_perm(n, b).unwrap().apply(&raw);
    let p1 = raw.iter().filter(|&&x| x).count() as f64 / n as f64;
    let want = binomial_weights(p1);
    let l1 = |h: [f64; 9]| h.iter().zip(&want).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let (before, after) = (l1(window_weights(&raw, b)), l1(window_weights(&shuffled, b)));
    eprintln!("8-bit window L1: raw {before:.4}, shuffled {after:.4}");
    assert!(after < 0.01);
    assert!(before > 0.1);
}
