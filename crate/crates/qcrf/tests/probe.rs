use qcrf::crf::Weights;
use qcrf::instances;
use qcrf::model::{trace_lambda_exp, trace_lambda_exp_weighted, QcrfInstance};
use qcrf::sim::{estimate_trace, EstimatorSettings, PrecisionConfig, TraceKind};

#[test]
fn probe_estimator() {
    // healthy small instance
    let table = instances::aligned_table(1, 2, 2);
    let w = Weights::new(vec![1.2, 0.9], 0.1).unwrap();
    let inst = QcrfInstance::new(table, w.clone(), vec![0]).unwrap();
    let cfg = PrecisionConfig::for_model(1, &w, 12, 0.1).unwrap();
    for kind in TraceKind::ALL {
        let exact = match kind {
            TraceKind::LxyH0 => trace_lambda_exp(inst.lambda_xy(), inst.h0()).unwrap(),
            TraceKind::LxyDh0 => trace_lambda_exp_weighted(inst.lambda_xy(), inst.h0(), &inst.dh0(0).unwrap()).unwrap(),
            TraceKind::LxHn => trace_lambda_exp(inst.lambda_x(), inst.hn()).unwrap(),
            TraceKind::LxDhn => trace_lambda_exp_weighted(inst.lambda_x(), inst.hn(), &inst.dhn(0).unwrap()).unwrap(),
        };
        let est = estimate_trace(&inst, kind, Some(0), &cfg, 100_000, 7).unwrap();
        println!("{:8} exact {:+.6} est {:+.6} ± {:.6}  p0 emp {:.4} ana {:.4} attempts {}",
            kind.name(), exact, est.value, est.std_error, est.p0_empirical, est.p0_analytic, est.postselect_attempts);
    }
    // paper scale gradient sanity at m=1e4
    let pinst = instances::paper_scale_instance(1024);
    let ds = pinst.dataset();
    let exact = qcrf::model::quantum_gradient_exact(&ds, &pinst.weights).unwrap();
    let settings = EstimatorSettings::new(12, 0.1);
    let qg = qcrf::sim::estimate_gradient(&ds, &pinst.weights, settings, 10_000, 42).unwrap();
    println!("paper-scale exact grad    {:?}", exact);
    println!("paper-scale sampled grad  {:?}", qg.gradient);
    println!("paper-scale reported se   {:?}", qg.std_error);
    let rel: Vec<f64> = exact.iter().zip(&qg.gradient).map(|(e, g)| (g - e).abs() / e.abs().max(1e-12)).collect();
    println!("per-component rel err     {:?}", rel);
}
