use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ltvc_core::{
    cascade_pair, parse, solve_linear_ode, synthesize_first_order_pair,
    synthesize_second_from_first, verify_chain, Grid, LtvSystem, DEFAULT_TOL,
};

fn worked_a() -> LtvSystem {
    LtvSystem::from_strs(&["t + 2", "t + 1"], -0.9, 10.0).unwrap()
}

fn expressions(c: &mut Criterion) {
    let e = parse("(t + 1)^2 * sin(3*t) + exp(-t/2) / (t + 2)").unwrap();
    let d = e.differentiate();
    c.bench_function("expr/eval", |b| b.iter(|| e.eval(black_box(1.3)).unwrap()));
    c.bench_function("expr/eval_derivative", |b| {
        b.iter(|| d.eval(black_box(1.3)).unwrap())
    });
    c.bench_function("expr/parse_differentiate", |b| {
        b.iter(|| {
            parse(black_box("(t + 1)^2 * sin(3*t) + exp(-t/2)"))
                .unwrap()
                .differentiate()
        })
    });
}

fn ode(c: &mut Criterion) {
    let a = worked_a();
    c.bench_function("ode/first_order_0_to_5", |b| {
        b.iter(|| {
            solve_linear_ode(
                a.coeffs(),
                |t| t.sin(),
                0.0,
                &[0.0],
                black_box(5.0),
                DEFAULT_TOL,
            )
            .unwrap()
        })
    });
    let x = synthesize_second_from_first(&a, 1.5, -2.0, 0.25).unwrap();
    c.bench_function("ode/second_order_0_to_5", |b| {
        b.iter(|| {
            solve_linear_ode(
                x.coeffs(),
                |t| t.sin(),
                0.0,
                &[0.0, 0.0],
                black_box(5.0),
                DEFAULT_TOL,
            )
            .unwrap()
        })
    });
}

fn cascades(c: &mut Criterion) {
    let a = worked_a();
    let b = synthesize_first_order_pair(&a, 2.0, 1.0).unwrap();
    let x = synthesize_second_from_first(&a, 1.5, -2.0, 0.25).unwrap();
    let grid = Grid::uniform(0.0, 5.0, 101).unwrap();
    let mut g = c.benchmark_group("cascade");
    g.sample_size(20);
    g.bench_function("pair_1_1", |bch| {
        bch.iter(|| cascade_pair(&a, &b, 0.0, &grid, DEFAULT_TOL).unwrap())
    });
    g.bench_function("pair_2_1", |bch| {
        bch.iter(|| cascade_pair(&x, &a, 0.0, &grid, DEFAULT_TOL).unwrap())
    });
    g.finish();
}

fn chains(c: &mut Criterion) {
    let a = worked_a();
    let b = synthesize_first_order_pair(&a, 2.0, 1.0).unwrap();
    let cc = synthesize_first_order_pair(&b, -0.5, 3.5).unwrap();
    let grid = Grid::uniform(0.0, 5.0, 101).unwrap();
    let mut g = c.benchmark_group("chain");
    g.sample_size(10);
    g.bench_function("verify_1_1_1", |bch| {
        bch.iter(|| verify_chain(&a, &b, &cc, &grid, 1e-6).unwrap())
    });
    g.finish();
}

criterion_group!(benches, expressions, ode, cascades, chains);
criterion_main!(benches);
