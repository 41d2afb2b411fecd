use criterion::{criterion_group, criterion_main, Criterion};
use yoneda_bench::{algebra, extension};
use yoneda_core::ore::{build_p_q, construct_chain_map, mapping_cone};
use yoneda_core::tor::k2_verdict_with_dims;
use yoneda_core::{minimal_resolution, tor_dims};

fn model(c: &mut Criterion) {
    c.bench_function("ex1 model D=8", |b| b.iter(|| algebra("ex1", 8)));
}

fn resolution(c: &mut Criterion) {
    let a = algebra("ex1", 8);
    c.bench_function("ex1 minimal resolution (4, 8)", |b| {
        b.iter(|| minimal_resolution(a.clone(), 4, 8).unwrap())
    });
}

fn bar_complex(c: &mut Criterion) {
    let a = algebra("ex1", 6);
    c.bench_function("ex1 bar Tor (4, 6)", |b| b.iter(|| tor_dims(&a, 4, 6).unwrap()));
    let betti = minimal_resolution(a.clone(), 4, 6).unwrap().betti_table();
    c.bench_function("ex1 k2 (4, 6)", |b| {
        b.iter(|| k2_verdict_with_dims(a.clone(), &betti).unwrap())
    });
}

fn cone(c: &mut Criterion) {
    let (a, om) = extension("ex1", 6);
    let r = minimal_resolution(a, 4, 6).unwrap();
    c.bench_function("ex1 chain map and cone (4, 6)", |b| {
        b.iter(|| {
            let pq = build_p_q(&r, &om).unwrap();
            let f = construct_chain_map(&pq, &om).unwrap();
            mapping_cone(&f, &pq).unwrap()
        })
    });
    let ext = om.ext().clone();
    c.bench_function("ex1 extension resolution (3, 6)", |b| {
        b.iter(|| minimal_resolution(ext.clone(), 3, 6).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = model, resolution, bar_complex, cone
}
criterion_main!(benches);
