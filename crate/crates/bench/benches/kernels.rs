use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use numrange::polytope::enumerate_vertices;
use numrange::scalar::rat_int;
use numrange::{numerical_index_exact, numerical_radius, op_norm, pi_norm, Field, Matrix, NormedSpace, Operator, TensorElement, C64};

fn mat(n: usize, m: usize, seed: u64) -> Matrix {
    // small deterministic pseudo-random entries
    let mut s = seed;
    let data = (0..n * m)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            C64::new(((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5, 0.0)
        })
        .collect();
    Matrix::new(n, m, data).unwrap()
}

fn bench_op_norm(c: &mut Criterion) {
    let x = NormedSpace::linf(4);
    let y = NormedSpace::l2(3, Field::Real);
    let m = mat(3, 4, 1);
    c.bench_function("op_norm linf4 -> l2_3", |b| {
        b.iter_batched(|| Operator::new(&x, &y, m.clone()).unwrap(), |t| black_box(op_norm(&t).value), BatchSize::SmallInput)
    });
}

fn bench_pi_norm(c: &mut Criterion) {
    let x = NormedSpace::l2(3, Field::Real);
    let y = NormedSpace::linf(3);
    let u = TensorElement::new(&x, &y, mat(3, 3, 2)).unwrap();
    c.bench_function("pi_norm l2_3 x linf3", |b| b.iter(|| black_box(pi_norm(&u).value)));
}

fn bench_double_description(c: &mut Criterion) {
    // facets of the 4-dimensional cross-polytope
    let mut normals = Vec::new();
    for mask in 0..16u32 {
        normals.push((0..4).map(|i| rat_int(if mask >> i & 1 == 1 { -1 } else { 1 })).collect::<Vec<_>>());
    }
    c.bench_function("vertex enumeration cross-polytope 4", |b| b.iter(|| black_box(enumerate_vertices(&normals, 8).unwrap().len())));
}

fn bench_radius(c: &mut Criterion) {
    let x = NormedSpace::l2(3, Field::Complex);
    let m = mat(3, 3, 3);
    c.bench_function("numerical radius complex l2_3", |b| {
        b.iter_batched(|| Operator::new(&x, &x, m.clone()).unwrap(), |t| black_box(numerical_radius(&t).unwrap().value), BatchSize::SmallInput)
    });
    let p = NormedSpace::l1(3);
    let m = mat(3, 3, 4);
    c.bench_function("numerical radius l1_3", |b| {
        b.iter_batched(|| Operator::new(&p, &p, m.clone()).unwrap(), |t| black_box(numerical_radius(&t).unwrap().value), BatchSize::SmallInput)
    });
}

fn bench_index(c: &mut Criterion) {
    let x = NormedSpace::l1(2);
    c.bench_function("exact numerical index l1_2", |b| b.iter(|| black_box(numerical_index_exact(&x).unwrap().value)));
}

criterion_group!(kernels, bench_op_norm, bench_pi_norm, bench_double_description, bench_radius, bench_index);
criterion_main!(kernels);
