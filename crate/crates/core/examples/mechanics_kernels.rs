//! Kinematics, invariants and stresses of the three homogeneous tests.
//!
//! ```bash
//! cargo run --release -p hypersr --example mechanics_kernels
//! ```

use hypersr::data::{gmr_derivatives, gmr_energy, GmrParameters};
use hypersr::mechanics::{self, EnergyDerivatives, LoadingMode, DEFAULT_FD_STEP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = GmrParameters::case(1).ok_or("case 1")?;
    println!("energy: {}\n", p.to_expression());
    println!("mode  stretch   I1bar    I2bar    P_fd [MPa]  P_exact [MPa]  P_tensor [MPa]");
    for mode in LoadingMode::ALL {
        for stretch in [1.0, 1.5, 2.0, 3.0] {
            let d = mechanics::deformation(mode, stretch)?;
            let ip = mechanics::invariants(&d);

            // Finite differences of the energy, as the search uses them.
            let fd = mechanics::energy_derivatives(|q, _| gmr_energy(&p, q), ip, &[], DEFAULT_FD_STEP);
            let p_fd = mechanics::nominal_stress(&fd, mode, stretch)?;

            let (d_i1, d_i2) = gmr_derivatives(&p, &ip);
            let exact = EnergyDerivatives { psi: fd.psi, d_i1, d_i2, d_j: 0.0 };
            let p_exact = mechanics::nominal_stress(&exact, mode, stretch)?;

            // Full tensor with the pressure fixed by the free lateral face.
            let pk = mechanics::pk1_full(&exact, &d)?;
            let pressure = pk[(2, 2)] * d.f[(2, 2)];
            let p_tensor = pk[(0, 0)] - pressure / d.f[(0, 0)];

            println!(
                "{:<5} {stretch:>6.2} {:>8.4} {:>8.4} {p_fd:>12.6} {p_exact:>14.6} {p_tensor:>15.6}",
                mode.tag(),
                ip.i1bar,
                ip.i2bar
            );
        }
    }
    Ok(())
}
