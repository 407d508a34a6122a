//! The learning step and the theory evaluated in `f32` follow the `f64` results.

use nplab::model::{self, Role, Rule, WeightMatrix};
use nplab::rules::dnp_step;
use nplab::theory::{self, TheoryParams};

#[test]
fn dnp_step_in_f32() {
    let rows64 = vec![vec![0.3, -0.2, 0.5, 0.1], vec![-0.4, 0.6, 0.0, 0.2]];
    let rows32: Vec<Vec<f32>> = rows64
        .iter()
        .map(|r| r.iter().map(|&v| v as f32).collect())
        .collect();
    let teacher64 = WeightMatrix::from_rows(rows64.clone(), Role::Teacher).unwrap();
    let student64 =
        WeightMatrix::from_rows(vec![vec![0.0; 4], vec![0.1; 4]], Role::Student).unwrap();
    let teacher32 = WeightMatrix::from_rows(rows32, Role::Teacher).unwrap();
    let student32 =
        WeightMatrix::from_rows(vec![vec![0.0f32; 4], vec![0.1; 4]], Role::Student).unwrap();
    let c64 = model::ModelConfig::new(4, 2, 0.01, 0.01, 0.2, Rule::Dnp).unwrap();
    let c32 = model::ModelConfig::<f32>::new(4, 2, 0.01, 0.01, 0.2, Rule::Dnp).unwrap();
    let x = [1.0, -0.5, 0.25, 2.0];
    let xi = [0.1, -0.05];
    let zeta = [-0.02, 0.08];
    let (a, _) = dnp_step(&student64, &teacher64, &x, &xi, &zeta, &c64).unwrap();
    let (b, _) = dnp_step(
        &student32,
        &teacher32,
        &x.map(|v| v as f32),
        &xi.map(|v| v as f32),
        &zeta.map(|v| v as f32),
        &c32,
    )
    .unwrap();
    for (u, v) in a.as_slice().iter().zip(b.as_slice()) {
        assert!((u - *v as f64).abs() < 1e-6, "{u} vs {v}");
    }
}

#[test]
fn theory_in_f32() {
    for m in [1usize, 3, 8] {
        let p64 = TheoryParams::new(m, 0.05, 1.0, 0.01);
        let p32 = TheoryParams::<f32>::new(m, 0.05, 1.0, 0.01);
        let re64 = theory::residual_error(&p64).unwrap();
        let re32 = theory::residual_error(&p32).unwrap();
        assert!(((re32 as f64 - re64) / re64).abs() < 1e-5);
        for t in [0.0, 5.0, 50.0] {
            let e64 = theory::eps_g_closed(t, 0.5, &p64);
            let e32 = theory::eps_g_closed(t as f32, 0.5, &p32);
            assert!(((e32 as f64 - e64) / e64).abs() < 1e-5);
        }
        assert!(
            (theory::gamma_at_eta_opt::<f32>(m) as f64 - theory::gamma_at_eta_opt::<f64>(m)).abs()
                < 1e-5
        );
    }
}
