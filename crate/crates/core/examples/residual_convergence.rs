//! Finite-difference residual of the wave operator on the packet: second
//! order convergence for the packet, no convergence for an off-shell wave.

use focuswave::cli::verify::residual_grid;
use focuswave::dynamics::{residual_wave_operator, Coord, ResidualOptions};
use focuswave::packets::{eval_bateman_hillion, PacketParams};
use focuswave::{Complex64, Envelope};

fn main() -> focuswave::Result<()> {
    let packet = PacketParams::massless(0.5, Envelope::gaussian(1.0)?)?;
    let grid = residual_grid()?;
    let r = residual_wave_operator(|p| eval_bateman_hillion(&packet, p), &grid, 0.0, 0.0, &ResidualOptions::default())?;
    let c = &r.convergence;
    println!("packet, {} nodes, finest {:?}", r.nodes, r.finest_shape);
    for (h, res) in c.spacings.iter().zip(&c.residuals) {
        println!("  h = {h:.5}: max residual {res:.3e}");
    }
    println!("  pairwise orders {:.3?}, fitted {:.3}", c.pairwise_orders, c.fitted_order);

    let opts = ResidualOptions {
        operator_axes: vec![Coord::Z],
        ..ResidualOptions::default()
    };
    let off = residual_wave_operator(
        |p| Ok(Complex64::from_polar(1.0, 2.0 * p.z - 1.5 * p.t)),
        &grid,
        0.0,
        0.0,
        &opts,
    )?;
    println!(
        "off-shell e^(i(2z - 1.5t)): residuals {:?}, passed {}",
        off.convergence.residuals, off.convergence.passed
    );
    Ok(())
}
