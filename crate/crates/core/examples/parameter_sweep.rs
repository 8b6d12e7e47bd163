//! A custom two-axis sweep, including a log axis.

use modecoupler::sweep::{run_sweep, Axis, SweepSpec};
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    let base = SystemParams::with_angle(1.0, 0.1, 1.0, 0.2, 0.01, std::f64::consts::FRAC_PI_3)?;
    let axes = vec!["epsilon=0.01:4:6:log".parse::<Axis>()?, "theta=0:1.5707963267948966:4".parse::<Axis>()?];
    let spec = SweepSpec::new(base, axes)?.with_outputs(&["c", "c1", "c2", "g2"])?;
    let table = run_sweep(&spec)?;
    table.write_csv(std::io::stdout().lock())?;
    eprintln!("{}", table.sidecar_json()?);
    Ok(())
}
