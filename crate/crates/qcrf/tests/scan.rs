use qcrf::instances;
use qcrf::model::quantum_gradient_exact;

#[test]
fn scan_paper_tables() {
    let mut best = (0u64, 0.0f64);
    for seed in 0..400u64 {
        let inst = instances::paper_scale_instance(seed);
        let ds = inst.dataset();
        let g = quantum_gradient_exact(&ds, &inst.weights).unwrap();
        let min = g.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        if min > best.1 { best = (seed, min); }
    }
    println!("best seed {} min|g_k| {}", best.0, best.1);
    let inst = instances::paper_scale_instance(best.0);
    let g = quantum_gradient_exact(&inst.dataset(), &inst.weights).unwrap();
    println!("gradient {:?}", g);
}
