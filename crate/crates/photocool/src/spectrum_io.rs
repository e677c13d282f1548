//! Spectrum CSV: a `# params_hash=0x…` line, then
//! `omega_rad_s,S_total,S_th,S_rp,S_shot`. Component cells are empty for
//! spectra without a per-source decomposition.

use std::io::{self, BufRead, Write};

use photocool_core::spectral::Spectrum;

pub fn write_spectrum_csv(spec: &Spectrum, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "# params_hash=0x{:016x}", spec.params_hash)?;
    writeln!(w, "omega_rad_s,S_total,S_th,S_rp,S_shot")?;
    let parts = !spec.thermal.is_empty();
    for i in 0..spec.len() {
        if parts {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e}",
                spec.freqs[i], spec.total[i], spec.thermal[i], spec.radiation_pressure[i], spec.shot[i]
            )?;
        } else {
            writeln!(w, "{:e},{:e},,,", spec.freqs[i], spec.total[i])?;
        }
    }
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
}

pub fn read_spectrum_csv(r: impl BufRead) -> io::Result<Spectrum> {
    let mut spec = Spectrum {
        freqs: Vec::new(),
        total: Vec::new(),
        thermal: Vec::new(),
        radiation_pressure: Vec::new(),
        shot: Vec::new(),
        params_hash: 0,
    };
    let mut seen_header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if let Some(rest) = line.strip_prefix("# params_hash=0x") {
            spec.params_hash = u64::from_str_radix(rest.trim(), 16).map_err(|e| bad(n, e))?;
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim() != "omega_rad_s,S_total,S_th,S_rp,S_shot" {
                return Err(bad(n, "unexpected header"));
            }
            seen_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(bad(n, "expected 5 columns"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(n, e));
        spec.freqs.push(num(cells[0])?);
        spec.total.push(num(cells[1])?);
        if !cells[2].is_empty() {
            spec.thermal.push(num(cells[2])?);
            spec.radiation_pressure.push(num(cells[3])?);
            spec.shot.push(num(cells[4])?);
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use photocool_core::presets;
    use photocool_core::spectral::{displacement_psd, resonance_grid};

    #[test]
    fn model_spectrum_round_trips() {
        let p = presets::benchmark();
        let spec = displacement_psd(&p, &resonance_grid(&p, 20).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&spec, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("# params_hash=0x{:016x}\n", p.fingerprint())));
        assert_eq!(read_spectrum_csv(buf.as_slice()).unwrap(), spec);
    }

    #[test]
    fn measured_spectrum_leaves_components_empty() {
        let spec = Spectrum {
            freqs: vec![0.0, 1.0],
            total: vec![2.0, 3.0],
            thermal: vec![],
            radiation_pressure: vec![],
            shot: vec![],
            params_hash: 7,
        };
        let mut buf = Vec::new();
        write_spectrum_csv(&spec, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().contains("1e0,3e0,,,"));
        assert_eq!(read_spectrum_csv(buf.as_slice()).unwrap(), spec);
    }
}
