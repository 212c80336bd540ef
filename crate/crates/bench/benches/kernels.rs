use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cuspflow_bench::fixture;
use cuspflow_core::*;

fn hexagon(c: &mut Criterion) {
    c.bench_function("hexagon_arcs", |b| {
        b.iter(|| hexagon_arcs(black_box([1.3, 2.1, 0.9])))
    });
    c.bench_function("hexagon_arcs_long", |b| {
        b.iter(|| hexagon_arcs(black_box([300.0, 250.0, 420.0])))
    });
    c.bench_function("arc_jacobian", |b| {
        b.iter(|| arc_jacobian(black_box([1.3, 2.1, 0.9])))
    });
}

fn surface(c: &mut Criterion) {
    let (tri, l0) = fixture("bipyramid");
    let w = [0.1, 0.3, -0.1, 0.2, 0.5];
    c.bench_function("boundary_lengths/bipyramid", |b| {
        b.iter(|| boundary_lengths(&tri, &l0, black_box(&w)))
    });
    c.bench_function("boundary_jacobian/bipyramid", |b| {
        b.iter(|| boundary_jacobian(&tri, &l0, black_box(&w)))
    });
    c.bench_function("total_energy/bipyramid", |b| {
        b.iter(|| total_energy(&tri, &l0, black_box(&w), QuadratureSpec::default()))
    });
}

fn solvers(c: &mut Criterion) {
    let (tri, l0) = fixture("tetra");
    let target = boundary_lengths(&tri, &l0, &[0.4, -0.1, 0.8, 0.2]).unwrap();
    c.bench_function("solve_prescribed/tetra", |b| {
        b.iter(|| solve_prescribed(&tri, &l0, black_box(&target), &SolveOptions::default()))
    });
    let (pants, pl0) = fixture("pants");
    let opts = FlowOptions {
        t_end: 1e7,
        cusp_tol: 1e-4,
        ..Default::default()
    };
    c.bench_function("flow_to_cusp/pants", |b| {
        b.iter(|| integrate_flow(&pants, &pl0, black_box(&opts)))
    });
}

criterion_group!(benches, hexagon, surface, solvers);
criterion_main!(benches);
