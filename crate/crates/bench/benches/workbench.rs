use criterion::{black_box, criterion_group, criterion_main, Criterion};
use modeq_bench::{lankford_system, sum_term};
use modeq_core::{
    eq_modulo, hilbert_basis, normal_form, parse_dio_system, parse_term, theory_info, TheoryId,
};

fn bench_hilbert(c: &mut Criterion) {
    let sys3 = parse_dio_system(&lankford_system(3)).unwrap();
    let sys4 = parse_dio_system(&lankford_system(4)).unwrap();
    c.bench_function("hilbert_lankford_3", |b| {
        b.iter(|| hilbert_basis(black_box(&sys3)).unwrap())
    });
    c.bench_function("hilbert_lankford_4", |b| {
        b.iter(|| hilbert_basis(black_box(&sys4)).unwrap())
    });
}

fn bench_eq(c: &mut Criterion) {
    let id = TheoryId::ACU;
    let s = sum_term(&id, &["x", "y", "x", "z", "y", "x", "0", "z"]);
    let t = sum_term(&id, &["z", "x", "y", "x", "z", "0", "x", "y"]);
    c.bench_function("eq_acu_shuffled_sum", |b| {
        b.iter(|| eq_modulo(&id, black_box(&s), black_box(&t)).unwrap())
    });
}

fn bench_free_band(c: &mut Criterion) {
    let id = TheoryId::AI;
    let t = sum_term(&id, &["x", "y", "x", "z", "y", "x", "z", "y", "x", "y"]);
    c.bench_function("free_band_normal_form", |b| {
        b.iter(|| normal_form(&id, black_box(&t)).unwrap())
    });
}

fn bench_distributivity(c: &mut Criterion) {
    let id = TheoryId::D;
    let sig = theory_info(&id).signature;
    let s = parse_term("m(p(x,y),m(p(u,v),w))", &sig).unwrap();
    let t = parse_term("p(m(x,m(p(u,v),w)),m(y,m(p(u,v),w)))", &sig).unwrap();
    c.bench_function("eq_d_distributed_pair", |b| {
        b.iter(|| eq_modulo(&id, black_box(&s), black_box(&t)).unwrap())
    });
}

criterion_group!(benches, bench_hilbert, bench_eq, bench_free_band, bench_distributivity);
criterion_main!(benches);
