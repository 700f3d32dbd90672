use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use geophase::models::reflectionless::{ReflectionlessModel, ReflectionlessParameters};
use geophase::oracles::box_oracle::{box_berry_phase, box_time_panels, BoxDiscretization};
use geophase::{PhysicalConstants, QuadratureScheme, SpectralBand};

fn well() -> ReflectionlessModel {
    ReflectionlessModel::new(ReflectionlessParameters::uniform(1.0, 1.0).unwrap(), PhysicalConstants::default()).unwrap()
}

fn smooth_kernel_sweep(model: &ReflectionlessModel, scheme: &QuadratureScheme) -> f64 {
    model.truncated_sweep(1.0, scheme).unwrap().value.re
}

fn box_sum(model: &ReflectionlessModel) -> f64 {
    let band = SpectralBand::centered(1.0, 0.4, 2).unwrap();
    let grid = BoxDiscretization::covering(200.0, 1.3, 0.25).unwrap();
    let window = model.params.crossing_window(100.0).unwrap();
    let scheme = QuadratureScheme { time_panels: box_time_panels(&grid, &band) / 2, ..QuadratureScheme::default() };
    box_berry_phase(model, &band, &grid, &window, &scheme).unwrap().gamma
}

/// Runs `f` once on a single worker and once on the default pool, or just
/// sequentially when the `parallel` feature is off.
fn compare<F: Fn() -> f64 + Sync>(c: &mut Criterion, name: &str, f: F) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("one_thread", |b| b.iter(|| single.install(|| black_box(f()))));
        group.bench_function("default_pool", |b| b.iter(|| black_box(f())));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(|| black_box(f())));
    group.finish();
}

fn benches(c: &mut Criterion) {
    let model = well();
    let scheme = model.recommended_scheme(8.0).with_levels(1);
    compare(c, "smooth_kernel_sweep_x8", || smooth_kernel_sweep(&model, &scheme));
    compare(c, "box_oracle_l200", || box_sum(&model));
}

criterion_group!(phase_sweeps, benches);
criterion_main!(phase_sweeps);
