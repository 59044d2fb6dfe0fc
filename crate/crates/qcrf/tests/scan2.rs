use qcrf::instances;
use qcrf::model::quantum_gradient_exact;
use qcrf::sim::{estimate_gradient, EstimatorSettings};

#[test]
fn probe_budgets() {
    let inst = instances::paper_scale_instance(226);
    let ds = inst.dataset();
    let exact = quantum_gradient_exact(&ds, &inst.weights).unwrap();
    let settings = EstimatorSettings::new(12, 0.1);
    for m in [10_000u64, 100_000, 1_000_000] {
        let mut worst_rel_over_seeds = Vec::new();
        let seeds: u64 = if m <= 100_000 { 8 } else { 2 };
        for seed in 0..seeds {
            let qg = estimate_gradient(&ds, &inst.weights, settings, m, seed).unwrap();
            let worst = exact.iter().zip(&qg.gradient)
                .map(|(e, g)| (g - e).abs() / e.abs())
                .fold(0.0f64, f64::max);
            worst_rel_over_seeds.push(worst);
        }
        println!("m={m:>8}: worst per-component rel err across seeds {:?}", worst_rel_over_seeds.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>());
    }
}
