use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use trion_bench::{random_matrix, random_state, sweep_params};
use trion_core::entangle::{reduce_over_hole, state_concurrence};
use trion_core::evolve::{integrate, propagator, IntegratorConfig};
use trion_core::floquet::quasienergies;
use trion_core::linalg::{eig_general, eig_hermitian};
use trion_core::model::hamiltonian_at;

fn bench_hamiltonian(c: &mut Criterion) {
    let params = sweep_params(24.6);
    c.bench_function("hamiltonian_at", |b| {
        b.iter(|| hamiltonian_at(black_box(&params), black_box(0.37)))
    });
}

fn bench_eigensolvers(c: &mut Criterion) {
    let general = random_matrix(7, 8);
    c.bench_function("eig_general_8x8", |b| b.iter(|| eig_general(black_box(&general)).unwrap()));

    let hermitian = {
        let m = random_matrix(8, 8);
        m.add(&m.adjoint()).unwrap().scale(num_complex::Complex64::new(0.5, 0.0))
    };
    c.bench_function("eig_hermitian_8x8", |b| {
        b.iter(|| eig_hermitian(black_box(&hermitian)).unwrap())
    });
}

fn bench_propagation(c: &mut Criterion) {
    let params = sweep_params(24.6);
    let cfg = IntegratorConfig::new(512, 8).unwrap();
    let psi0 = random_state(3);
    c.bench_function("integrate_one_period_512", |b| {
        b.iter(|| integrate(black_box(&params), &psi0, 0.0, params.period(), &cfg).unwrap())
    });
    let fine = IntegratorConfig::new(2048, 8).unwrap();
    c.bench_function("propagator_one_period_2048", |b| {
        b.iter(|| propagator(black_box(&params), 0.0, params.period(), &fine).unwrap())
    });
    c.bench_function("quasienergies_2048", |b| {
        b.iter(|| quasienergies(black_box(&params), &fine).unwrap())
    });
}

fn bench_entanglement(c: &mut Criterion) {
    let psi = random_state(11);
    c.bench_function("reduce_over_hole", |b| b.iter(|| reduce_over_hole(black_box(&psi))));
    c.bench_function("concurrence", |b| b.iter(|| state_concurrence(black_box(&psi)).unwrap()));
}

criterion_group!(
    benches,
    bench_hamiltonian,
    bench_eigensolvers,
    bench_propagation,
    bench_entanglement
);
criterion_main!(benches);
