use yukawa_core::kernel::{eigenvalue, eigenvalue_table};
use yukawa_core::solver::{evolve, evolution_report};
use yukawa_core::spaces::spectral_norm;
use yukawa_core::{Field, InitialData, Norm, Params, Quadrature, Table};

fn table() -> Table {
    eigenvalue_table(12, 4, &Params::new(1.0).unwrap(), &Quadrature::default()).unwrap()
}

#[test]
fn aliases_cover_the_main_path() {
    let t = table();
    let g: Field = "modes:2,0,0=1;3,1,1=0.5+0.5i".parse::<InitialData>().unwrap().materialize(&t).unwrap();
    let norm: Norm = "domaindual:tau=1".parse().unwrap();
    let n0 = spectral_norm(&g, &norm, Some(&t)).unwrap();
    let n1 = spectral_norm(&evolve(&g, 1.0, &t).unwrap(), &norm, Some(&t)).unwrap();
    assert!(n1 < n0);
    let r = evolution_report(&g, &[0.0, 0.5, 1.0], &[norm, Norm::L2], &t).unwrap();
    assert!(r.decay_slopes.iter().all(|d| d.rate.unwrap() > 0.0));
}

#[test]
fn single_precision_agrees_with_double() {
    type P32 = yukawa_core::kernel::KernelParams<f32>;
    type Q32 = yukawa_core::kernel::QuadratureSpec<f32>;
    let q = Q32::new(1e-5, 1e-7, 100_000, 20).unwrap();
    let single = eigenvalue(3, 2, &P32::new(2.0).unwrap(), &q).unwrap().lambda;
    let double = eigenvalue(3, 2, &Params::new(2.0).unwrap(), &Quadrature::default()).unwrap().lambda;
    assert!(((single as f64) - double).abs() < 1e-4 * double);
}

#[test]
fn series_data_materializes_from_the_table() {
    let t = table();
    let g = InitialData::S2DelaySeries { n_max: 12 }.materialize(&t).unwrap();
    assert_eq!(g.len(), 11);
    assert!(InitialData::S2DelaySeries { n_max: 13 }.materialize(&t).is_err());
}
