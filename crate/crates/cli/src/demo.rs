//! The three-system first-order example: `A`, `B = 2A + 1`, `C = -B/2 + 7/2`.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Result};
use ltvc_core::report::sig;
use ltvc_core::{
    delta_integrand, integrate_adaptive, verify_chain_with, write_system_file, DefectReport, Grid,
    LtvSystem, PairConstants,
};

use crate::io::write_atomic;

pub struct Demo {
    pub text: String,
    pub ok: bool,
}

pub fn systems() -> Result<[(&'static str, LtvSystem); 3]> {
    let sys = |c: &[&str]| LtvSystem::from_strs(c, -0.9, 10.0)?.with_initial_state(0.0, vec![0.0]);
    Ok([
        ("A", sys(&["t + 2", "t + 1"])?),
        ("B", sys(&["2*t + 5", "2*(t + 1)"])?),
        ("C", sys(&["-t + 1", "-(t + 1)"])?),
    ])
}

pub fn write_systems(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, s) in systems()? {
        write_atomic(&dir.join(format!("{name}.sys")), &write_system_file(&s))?;
    }
    Ok(())
}

fn at(d: &DefectReport, t: f64) -> Result<(f64, f64)> {
    let i = d
        .grid
        .iter()
        .position(|&g| (g - t).abs() < 1e-12)
        .ok_or_else(|| anyhow!("t = {t} is not a grid point"))?;
    Ok((d.h_ab[i], d.h_ba[i]))
}

pub fn constants_tuple(c: &Option<PairConstants>) -> String {
    match c {
        Some(c) => {
            let (names, values): (Vec<_>, Vec<_>) =
                c.values().into_iter().map(|(k, v)| (k, sig(v, 9))).unzip();
            format!("({}) = ({})", names.join(","), values.join(","))
        }
        None => "none".into(),
    }
}

pub fn run(tol: f64, ode_tol: f64) -> Result<Demo> {
    let [(_, a), (_, b), (_, c)] = systems()?;
    let grid = Grid::uniform(0.0, 5.0, 101)?;
    let chain = verify_chain_with(&a, &b, &c, &grid, tol, ode_tol)?;
    let missing = || anyhow!("no numerical defect in the chain report");
    let ab = chain.ab.defect.as_ref().ok_or_else(missing)?;
    let ac = chain.ac.defect.as_ref().ok_or_else(missing)?;
    let (h_ab, h_ba) = at(ab, 1.0)?;
    let (h_ac, h_ca) = at(ac, 1.0)?;

    let taus = Grid::uniform(0.0, 2.0, 101)?;
    let mut delta_max: f64 = 0.0;
    for &tau in taus.iter() {
        delta_max = delta_max.max(delta_integrand(&a, &b, 0.0, tau, 2.0, 1e-12)?.abs());
    }
    let delta_int = integrate_adaptive(
        |tau| delta_integrand(&a, &b, 0.0, tau, 2.0, 1e-12),
        0.0,
        2.0,
        1e-11,
    )?;

    let mut s = String::new();
    writeln!(s, "systems (t0 = 0, grid [0, 5] with 101 points)")?;
    writeln!(s, "  A: (t+1) y' + (t+2) y = x")?;
    writeln!(s, "  B: 2(t+1) y' + (2t+5) y = x")?;
    writeln!(s, "  C: -(t+1) y' + (1-t) y = x")?;
    writeln!(s)?;
    writeln!(s, "(A,B) {}", constants_tuple(&chain.ab.constants))?;
    writeln!(s, "  h_AB(1,0) = {}", sig(h_ab, 9))?;
    writeln!(s, "  h_BA(1,0) = {}", sig(h_ba, 9))?;
    writeln!(s, "  max |h_AB - h_BA| = {}", sig(ab.defect, 9))?;
    writeln!(s, "(B,C) {}", constants_tuple(&chain.bc.constants))?;
    writeln!(s, "(A,C) {}", constants_tuple(&chain.ac.constants))?;
    writeln!(
        s,
        "  predicted by composition {}",
        constants_tuple(&chain.predicted)
    )?;
    writeln!(s, "  h_AC(1,0) = {}", sig(h_ac, 9))?;
    writeln!(s, "  h_CA(1,0) = {}", sig(h_ca, 9))?;
    writeln!(s, "  max |h_AC - h_CA| = {}", sig(ac.defect, 9))?;
    writeln!(s)?;
    writeln!(
        s,
        "integrand Delta(0, tau, 2) = h_B(2,tau) h_A(tau,0) - h_A(2,tau) h_B(tau,0)"
    )?;
    writeln!(s, "  max over 101 tau  {}", sig(delta_max, 9))?;
    writeln!(s, "  integral over tau {}", sig(delta_int, 9))?;
    writeln!(
        s,
        "  the integrand is not zero pointwise; only its integral vanishes"
    )?;
    writeln!(s)?;
    write!(s, "{chain}")?;
    writeln!(s)?;
    writeln!(s, "[result]")?;
    writeln!(s, "h_ab.1_0={}", sig(h_ab, 9))?;
    writeln!(s, "h_ba.1_0={}", sig(h_ba, 9))?;
    writeln!(s, "h_ac.1_0={}", sig(h_ac, 9))?;
    writeln!(s, "delta.max={}", sig(delta_max, 9))?;
    writeln!(s, "delta.integral={}", sig(delta_int, 9))?;
    s.push_str(&chain.machine_block());
    Ok(Demo {
        text: s,
        ok: chain.transitive,
    })
}
