use robin_spectra::*;
fn main() {
    let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
    let s = SweepSettings {
        l_values: vec![8.0, 16.0],
        nx_values: vec![64, 128, 256],
        ny_values: vec![4, 8, 16],
        ends: EndCondition::Neumann,
        k: 4,
        tol: 1e-11,
        stability_tol: 1e-5,
        threads: None,
    };
    let r = find_bound_states(&profile, 1.0, &s).unwrap();
    for row in &r.convergence {
        println!(
            "L={:5} h={:.4} k={} lambda={:+.12} resid={:.2e} extrap={:?} class={}",
            row.half_length, row.h, row.index, row.lambda, row.residual, row.extrapolated, row.classified
        );
    }
    println!("unresolved: {:?}", r.unresolved);
    for b in &r.bound_states { println!("bound: {:?}", b); }
}
