use largespin::analysis::{equilibrium_bloch, extract_decay_time};
use largespin::bath::{compute_rates, BathSpec, RateSet};
use largespin::dynamics::{
    expectation, initial_state_spin_up, initial_state_x_up, MasterEquation, TimeGrid, Trajectory,
};
use largespin::spin::{hamiltonian, SpinOperators, SpinSize, SystemParams};

fn solve(two_j: u32, eps: f64, bath: BathSpec, t_end: f64, dt: f64, x_up: bool) -> (SystemParams, RateSet, Trajectory) {
    let spin = SpinSize::from_two_j(two_j).unwrap();
    let params = SystemParams::new(spin, eps, 1.0).unwrap();
    let ops = SpinOperators::new(spin);
    let rates = compute_rates(&params, &bath).unwrap();
    let rho0 = if x_up {
        initial_state_x_up(spin, &ops).unwrap()
    } else {
        initial_state_spin_up(spin)
    };
    let grid = TimeGrid::new(t_end, dt, Some(1)).unwrap();
    let traj = MasterEquation::new(&params, &ops, &rates).unwrap().run(&rho0, &grid).unwrap();
    (params, rates, traj)
}

#[test]
fn free_evolution_conserves_energy() {
    let spin = SpinSize::from_two_j(4).unwrap();
    let params = SystemParams::new(spin, 0.7, 1.0).unwrap();
    let ops = SpinOperators::new(spin);
    let h = hamiltonian(&params, &ops).unwrap();
    let rates = RateSet::zero(params.delta());
    let eq = MasterEquation::new(&params, &ops, &rates).unwrap();
    let mut rho = initial_state_x_up(spin, &ops).unwrap().into_inner();
    let e0 = expectation(&rho, &h);
    for _ in 0..2000 {
        rho = largespin::dynamics::rk4_step(&|r: &largespin::CMatrix| eq.rhs(r), &rho, 0.005);
    }
    assert!((expectation(&rho, &h) - e0).abs() < 1e-10);
}

#[test]
fn unbiased_x_polarized_state_is_stationary_without_bath() {
    let bath = BathSpec::new(0.0, 50.0, 0.0).unwrap();
    let (_, _, traj) = solve(6, 0.0, bath, 5.0, 0.002, true);
    for &jx in &traj.jx {
        assert!((jx - 3.0).abs() < 1e-10);
    }
}

#[test]
fn heisenberg_relation_for_larger_spins() {
    let bath = BathSpec::new(0.02, 50.0, 0.5).unwrap();
    for two_j in [2, 3, 8] {
        let (params, _, traj) = solve(two_j, 1.5, bath, 5.0, 0.001, false);
        let h = 0.002;
        for k in 1..traj.len() - 1 {
            let fd = (traj.jz[k + 1] - traj.jz[k - 1]) / h;
            assert!((fd - 2.0 * params.tc * traj.jy[k]).abs() < 1e-4, "2J = {two_j}, k = {k}");
        }
    }
}

#[test]
fn spin_half_relaxes_to_bloch_equilibrium() {
    let bath = BathSpec::new(0.05, 50.0, 2.0).unwrap();
    let (params, rates, traj) = solve(1, 1.0, bath, 60.0, 0.004, false);
    let eq = equilibrium_bloch(&params, &rates).unwrap();
    assert!((traj.jz.last().unwrap() - eq.jz_inf).abs() < 1e-6);
    assert!((traj.jx.last().unwrap() - eq.jx_inf).abs() < 1e-6);
}

#[test]
fn x_polarized_decay_accelerates_with_spin() {
    let bath = BathSpec::new(0.01, 50.0, 0.0).unwrap();
    let mut previous = f64::INFINITY;
    for two_j in [1, 4, 10] {
        let (_, _, traj) = solve(two_j, 0.0, bath, 200.0, 0.005, true);
        let j = traj.spin.j();
        let k = traj.jx.iter().position(|&x| x / j < 0.0).expect("J_x changes sign");
        let t = traj.times[k];
        assert!(t < previous, "2J = {two_j}: {t} vs {previous}");
        previous = t;
    }
}

#[test]
fn biased_decay_accelerates_with_spin() {
    let bath = BathSpec::new(0.005, 50.0, 1.0).unwrap();
    let (_, _, half) = solve(1, 10.0, bath, 150.0, 0.002, false);
    let (_, _, three) = solve(6, 10.0, bath, 150.0, 0.002, false);
    let t_half = extract_decay_time(&half, 0.0).unwrap();
    let t_three = extract_decay_time(&three, 0.0).unwrap();
    assert!(t_three < t_half);
}

#[test]
fn trace_and_hermiticity_hold_for_every_spin() {
    let bath = BathSpec::new(0.05, 50.0, 1.0).unwrap();
    for two_j in 1..=8 {
        let (_, _, traj) = solve(two_j, 0.5, bath, 4.0, 0.002, two_j % 2 == 0);
        assert!(traj.max_trace_error() < 1e-12);
        assert!(traj.max_hermiticity_error() < 1e-12);
    }
}
