use chrono::TimeDelta;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use orgsignals::graph::{brandes_betweenness, SimpleGraph};
use orgsignals::ingest::parse_mbox_bytes;
use orgsignals::signals::{Period, UnitScope};
use orgsignals::synth::write_mbox_to;
use orgsignals::{compute_signal_record, IngestConfig, SignalConfig};
use orgsignals_bench::random_corpus;

fn ring_with_chords(n: usize) -> SimpleGraph {
    let edges = (0..n)
        .flat_map(|i| [(i, (i + 1) % n), (i, (i * 7 + 3) % n)])
        .filter(|(a, b)| a != b);
    SimpleGraph::from_edges(n, edges)
}

fn brandes(c: &mut Criterion) {
    let mut group = c.benchmark_group("brandes");
    for n in [50, 200, 500] {
        let g = ring_with_chords(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| brandes_betweenness(g))
        });
    }
    group.finish();
}

fn parse(c: &mut Criterion) {
    let corpus = random_corpus(100, 28, 0.05);
    let mut bytes = Vec::new();
    write_mbox_to(&corpus.events, &mut bytes).unwrap();
    let cfg = IngestConfig::default();
    let mut group = c.benchmark_group("parse_mbox");
    group.throughput(Throughput::Bytes(bytes.len() as u64));
    group.sample_size(20);
    group.bench_function("synthetic", |b| b.iter(|| parse_mbox_bytes(&bytes, &cfg)));
    group.finish();
}

fn signals(c: &mut Criterion) {
    let corpus = random_corpus(100, 28, 0.05);
    let cfg = SignalConfig {
        lexicon: corpus.lexicon.to_config(),
        ..SignalConfig::default()
    };
    let start = corpus.spec.start;
    let period = Period {
        start,
        end: start + TimeDelta::days(28),
    };
    let mut group = c.benchmark_group("signal_record");
    group.throughput(Throughput::Elements(corpus.events.len() as u64));
    group.sample_size(20);
    group.bench_function("whole_corpus", |b| {
        b.iter(|| compute_signal_record(UnitScope::All("all"), period, &corpus.events, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, brandes, parse, signals);
criterion_main!(benches);
