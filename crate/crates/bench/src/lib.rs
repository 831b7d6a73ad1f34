//! Shared fixtures for the kernel benchmarks.

use ecvm_core::harness::{weibel_initial_state, WeibelParams};
use ecvm_core::integrators::State;
use ecvm_core::{build_mesh, Mesh1D2V};

/// Run 1 mesh with `n` cells per direction on the physics velocity box.
pub fn weibel_mesh(n: usize, k: usize) -> Mesh1D2V {
    build_mesh(n, n, n, WeibelParams::run1().length(), 1.5, 1.5, k).expect("valid mesh")
}

/// Run 1 initial state with the seed amplified so the force terms are not negligible.
pub fn weibel_state(mesh: &Mesh1D2V) -> State {
    let params = WeibelParams {
        b: 0.05,
        ..WeibelParams::run1()
    };
    let mut s = weibel_initial_state(&params, mesh).expect("mesh spans the preset");
    s.em.e1 = mesh.x2().nodes().iter().map(|x| 0.01 * (0.2 * x).cos()).collect();
    s
}
