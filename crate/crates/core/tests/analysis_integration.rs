//! Cross-module checks: the bound-state sweep, the Rayleigh–Ritz link between
//! the trial functional and the discrete spectrum, and eigenfunction symmetry.

use robin_spectra::{
    assemble, criterion_check, find_bound_states, smallest_eigenpairs, threshold, variational_q,
    CouplingProfile, CriterionVerdict, CutoffFunction, EndCondition, StripGrid, SweepSettings,
    TransversalParams,
};

fn small_sweep() -> SweepSettings {
    SweepSettings {
        l_values: vec![8.0, 16.0],
        nx_values: vec![64, 128, 256],
        ny_values: vec![4, 8, 16],
        ends: EndCondition::Neumann,
        k: 4,
        tol: 1e-11,
        stability_tol: 1e-5,
        threads: None,
    }
}

#[test]
fn gaussian_bump_yields_a_bound_state() {
    let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
    let report = find_bound_states(&profile, 1.0, &small_sweep()).unwrap();
    assert_eq!(report.threshold, -1.0);
    assert!(
        !report.bound_states.is_empty(),
        "expected a certified state, unresolved: {:?}",
        report.unresolved
    );
    let state = &report.bound_states[0];
    assert!(state.extrapolated < -1.0 - state.error_bar);
    assert!(state.error_bar > 0.0);
    let crit = report.criterion.as_ref().expect("criterion summary");
    assert_eq!(crit.verdict, CriterionVerdict::PredictsBoundState);
    assert!(report.provenance.within_paper_hypotheses);
}

#[test]
fn constant_profile_has_empty_discrete_spectrum() {
    let profile = CouplingProfile::constant(1.0);
    let report = find_bound_states(&profile, 1.0, &small_sweep()).unwrap();
    assert!(
        report.bound_states.is_empty(),
        "spurious bound states: {:?}",
        report.bound_states
    );
    // the truncated continuum approaches the threshold from above
    let fine = report
        .convergence
        .iter()
        .filter(|r| r.half_length == 16.0 && r.index == 0)
        .last()
        .unwrap();
    assert!(fine.lambda >= -1.0 - 1e-9, "λ_min = {}", fine.lambda);
    assert!((fine.extrapolated.unwrap() + 1.0).abs() < 1e-3);
}

#[test]
fn mirrored_profile_matches_the_other_criterion_branch() {
    let profile = CouplingProfile::gaussian_bump(-1.0, -0.5, 1.0).unwrap();
    let report = find_bound_states(&profile, 1.0, &small_sweep()).unwrap();
    assert!(!report.bound_states.is_empty());
    let crit = report.criterion.as_ref().unwrap();
    assert!(crit.excess_integral < 0.0);
    assert_eq!(crit.verdict, CriterionVerdict::PredictsBoundState);
}

#[test]
fn bound_state_decay_rate_tracks_the_gap() {
    let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
    let report = find_bound_states(&profile, 1.0, &small_sweep()).unwrap();
    let state = &report.bound_states[0];
    let fitted = state.decay_rate.expect("decay fit");
    let predicted = state.decay_rate_predicted;
    assert!(
        (fitted - predicted).abs() <= 0.2 * predicted,
        "fitted {fitted} vs predicted {predicted}"
    );
}

#[test]
fn rayleigh_ritz_coherence() {
    // a certified negative Q(u_n*) forces the discrete pencil containing
    // supp(u_n*) below the threshold
    let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
    let eps = 1.0;
    let crit = criterion_check(&profile, eps).unwrap();
    let n_star = crit.certified_scale.expect("certified scale");
    let q_star = crit.q_at_certified.unwrap();
    assert!(q_star < 0.0);

    let grid = StripGrid::new(
        n_star.max(8.0),
        eps,
        (16.0 * n_star.max(8.0)) as usize,
        16,
        EndCondition::Neumann,
    )
    .unwrap();
    let pencil = assemble(&grid, &profile);

    // the sampled trial function is itself a Rayleigh quotient witness
    let params = TransversalParams::new(profile.alpha0(), eps).unwrap();
    let mode = robin_spectra::robin_modes(&params, 0).unwrap()[0];
    let cutoff = CutoffFunction::new(n_star).unwrap();
    let trial = pencil.sample(&grid, |x, y| {
        cutoff.value(x) * robin_spectra::eigenfunction_value(&mode, &params, y).unwrap()
    });
    let quotient = pencil.rayleigh_quotient(&trial);
    let thr = threshold(&profile);
    assert!(
        quotient < thr,
        "discrete quotient {quotient} not below threshold {thr}"
    );

    let eig = smallest_eigenpairs(&pencil, 1, 1e-11).unwrap();
    assert!(eig.values[0] <= quotient + 1e-12, "λ_min must lower-bound the quotient");
    assert!(
        eig.values[0] < thr - 1e-6,
        "λ_min = {} fails to clear the threshold",
        eig.values[0]
    );
}

#[test]
fn even_profile_gives_even_ground_state() {
    let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
    let grid = StripGrid::new(10.0, 1.0, 100, 10, EndCondition::Neumann).unwrap();
    let pencil = assemble(&grid, &profile);
    let eig = smallest_eigenpairs(&pencil, 1, 1e-11).unwrap();
    let v = &eig.vectors[0];
    let ny1 = grid.ny + 1;
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for ix in 0..=grid.nx {
        for iy in 0..ny1 {
            let a = v[ix * ny1 + iy];
            let b = v[(grid.nx - ix) * ny1 + iy];
            defect = defect.max((a - b).abs());
            scale = scale.max(a.abs());
        }
    }
    assert!(defect < 1e-6 * scale, "reflection residual {defect:e} at scale {scale:e}");
}

#[test]
fn q_scale_below_one_rejected() {
    let profile = CouplingProfile::constant(1.0);
    assert!(variational_q(&profile, 1.0, 0.5).is_err());
}

#[test]
fn sweep_settings_are_validated() {
    let profile = CouplingProfile::constant(1.0);
    let mut s = small_sweep();
    s.nx_values = vec![32, 64];
    s.ny_values = vec![4, 8];
    assert!(find_bound_states(&profile, 1.0, &s).is_err(), "needs three h-levels");
    let mut s2 = small_sweep();
    s2.l_values = vec![8.0];
    assert!(find_bound_states(&profile, 1.0, &s2).is_err(), "needs two L values");
}
