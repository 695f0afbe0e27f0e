use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinref_bench::{thermal_bits, SIZES};
use spinref_core::compiler::{compile_phase1, compile_phase2_round};
use spinref_core::cooling::{pipeline_on, PipelineConfig, PipelineMode, Shuffle};
use spinref_core::polymer::{induced_permutation, two_tape_rotate_seq, two_tape_stride, PolymerSpec};
use spinref_core::{icbrt, TapeState};

fn compiled_programs(c: &mut Criterion) {
    let mut g = c.benchmark_group("compiled");
    for n in [64, 256] {
        let bits = thermal_bits(n, 0.2);
        let p1 = compile_phase1(n).unwrap();
        g.bench_with_input(BenchmarkId::new("phase1", n), &bits, |b, bits| {
            b.iter(|| {
                let mut t = TapeState::new(bits.clone()).unwrap();
                t.run(&p1.ops).unwrap();
                black_box(t.logical())
            })
        });
        let p2 = compile_phase2_round(n, 4).unwrap();
        g.bench_with_input(BenchmarkId::new("phase2_k4", n), &bits, |b, bits| {
            b.iter(|| {
                let mut t = TapeState::new(bits.clone()).unwrap();
                t.run(&p2.ops).unwrap();
                black_box(t.logical())
            })
        });
    }
    g.finish();
}

fn pipelines(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    for n in SIZES {
        let bits = thermal_bits(n, 0.25);
        for (name, mode) in [("direct", PipelineMode::BinomialDirect), ("stride", PipelineMode::ShuffledBlocks(Shuffle::Stride))] {
            let cfg = PipelineConfig { mode, ..PipelineConfig::default() };
            g.bench_with_input(BenchmarkId::new(name, n), &bits, |b, bits| {
                b.iter(|| black_box(pipeline_on(bits.clone(), 0.25, 1, &cfg).unwrap().clean_bits))
            });
        }
    }
    g.finish();
}

fn polymer(c: &mut Criterion) {
    let mut g = c.benchmark_group("polymer");
    let spec = PolymerSpec::new("ABCD", 1000).unwrap();
    let seq = two_tape_rotate_seq();
    g.bench_function("rotate_seq_1000_periods", |b| b.iter(|| black_box(induced_permutation(&spec, &seq).unwrap())));
    for n in SIZES {
        let bits = thermal_bits(n, 0.25);
        g.bench_with_input(BenchmarkId::new("two_tape_stride", n), &bits, |b, bits| {
            b.iter(|| black_box(two_tape_stride(bits, icbrt(n)).unwrap().1))
        });
    }
    g.finish();
}

criterion_group!(benches, compiled_programs, pipelines, polymer);
criterion_main!(benches);
