//! The packet as a superposition of parabolic-equation solutions
//! û = β⁻¹ exp(ia(x² + y²)/β) f̂(a): residual order of a single component and
//! quadrature synthesis against the closed form.

use focuswave::dynamics::{Axis, Coord, GridSpec};
use focuswave::packets::{parabolic_residual, sample_bateman_hillion, synthesize_from_parabolic, PacketParams, ParabolicSolution};
use focuswave::Envelope;

fn main() -> focuswave::Result<()> {
    let epsilon = 0.5;
    let env = Envelope::gaussian(1.0)?;
    let hat = env.inverse_pair()?;

    let sol = ParabolicSolution::at_event(1.3, 0.4, 0.3, epsilon, hat.clone())?;
    let nodes = [(0.0, 0.0), (0.4, 0.15), (0.8, 0.6)];
    let r = parabolic_residual(&sol, &nodes, 0.05)?;
    println!("residual of ∂²x + ∂²y + 4ia ∂β on one component");
    for (h, res) in r.spacings.iter().zip(&r.residuals) {
        println!("  h = {h:.4}: {res:.3e}");
    }
    println!("  fitted order {:.3}", r.fitted_order);

    let grid = GridSpec::new(
        vec![Axis::closed(Coord::X, 0.0, 2.0, 16)?, Axis::closed(Coord::Z, -2.0, 2.0, 16)?],
        [0.0; 3],
    )?;
    let t = 0.7;
    let synth = synthesize_from_parabolic(&hat, epsilon, &grid, t)?;
    let exact = sample_bateman_hillion(&PacketParams::massless(epsilon, env)?, &grid, t, false)?;
    println!("synthesis vs closed form, relative L2: {:.2e}", synth.relative_l2_error(&exact)?);
    Ok(())
}
