use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dgforge_core::dgg::formality_witness;
use dgforge_core::exec::Exec;
use dgforge_core::lift::{default_probes, verify_segment_equivalence, Segment, TruncatedIso};
use dgforge_core::samples::{self, random, random_filt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn formality_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let algebras: Vec<_> = (0..32).map(|_| Arc::new(random::pure_dgg(&mut rng))).collect();
    let mut group = c.benchmark_group("formality_batch");
    for mode in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            b.iter(|| mode.map(&algebras, |r| formality_witness(r).map(|w| w.passed()).unwrap_or(false)))
        });
    }
    group.finish();
}

fn segment_report(c: &mut Criterion) {
    let phi = samples::poly_projection(Arc::new(samples::eqpt(8)), Arc::new(samples::poly_trunc(2)));
    let iso = TruncatedIso::new(phi).unwrap();
    let seg = Segment::new(0, 1).unwrap();
    let mut probes = default_probes(&iso.source, seg);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    probes.extend((0..6).map(|_| random_filt::module(&mut rng, &iso.source, 1)));
    probes.retain(|p| p.summands().iter().all(|s| seg.contains(-s.shift)));
    let mut group = c.benchmark_group("segment_report");
    group.sample_size(10);
    for mode in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            b.iter(|| verify_segment_equivalence(&iso, seg, &probes, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, formality_batch, segment_report);
criterion_main!(benches);
