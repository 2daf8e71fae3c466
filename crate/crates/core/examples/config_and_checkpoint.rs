// Config text, binary checkpoints and VTK output.

use lcdo::diffuse::total_energy;
use lcdo::io::{vtk, Checkpoint, RunConfig};
use lcdo::optimizer::Progress;

const CONFIG: &str = "\
# hedgehog droplet
grid.nx = 16
grid.ny = 16
grid.nz = 16
surface.lambda = 0.5
diffuse.eps_phi = 0.25
diffuse.eps_v = 0.25
init.shape = ball(0.6)
init.director = hedgehog
";

pub fn run_example() -> lcdo::Result<()> {
    let config = RunConfig::parse(CONFIG)?;
    for w in config.validate()? {
        println!("warning: {w}");
    }
    assert_eq!(RunConfig::parse(&config.print())?, config);
    let state = config.initial_state()?;
    let model = config.model()?;
    let before = total_energy(&state, &model);

    let dir = std::env::temp_dir().join(format!("lcdo-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("state.ckpt");
    let progress = Progress { iter: 0, rung: 0, rung_iter: 0, tau: config.schedule.tau, last_energy: before.e_total };
    Checkpoint { config: config.clone(), progress, state: state.clone() }.save(&path)?;
    let back = Checkpoint::load(&path)?;
    let after = total_energy(&back.state, &back.config.model()?);
    println!("energy before {:e}, after reload {:e}", before.e_total, after.e_total);
    assert_eq!(before.e_total.to_bits(), after.e_total.to_bits());

    vtk::write(&dir.join("state.vtk"), &state)?;
    let text = std::fs::read_to_string(dir.join("state.vtk"))?;
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
