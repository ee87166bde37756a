//! FCIDUMP ingestion and the spin-orbital electronic Hamiltonian.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{jordan_wigner, FermionOperator, LadderProduct};
use crate::pauli::PauliSum;

const SYMMETRY_TOL: f64 = 1e-10;

/// Spatial-orbital integrals in chemist notation plus the scalar core energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularHamiltonian {
    pub label: String,
    n_spatial: usize,
    n_electrons: usize,
    ms2: i64,
    core_energy: f64,
    h1: Vec<f64>,
    h2: Vec<f64>,
}

impl MolecularHamiltonian {
    /// Builds a Hamiltonian from dense tensors, validating the permutational
    /// symmetries.
    pub fn new(
        n_spatial: usize,
        n_electrons: usize,
        core_energy: f64,
        h1: Vec<f64>,
        h2: Vec<f64>,
    ) -> Result<Self> {
        let n = n_spatial;
        if h1.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: h1.len(),
            });
        }
        if h2.len() != n * n * n * n {
            return Err(Error::Dimension {
                expected: n * n * n * n,
                found: h2.len(),
            });
        }
        if n_electrons == 0 || n_electrons > 2 * n_spatial {
            return Err(Error::Integrity(format!(
                "electron count {n_electrons} incompatible with {n_spatial} spatial orbitals"
            )));
        }
        let ham = Self {
            label: String::new(),
            n_spatial,
            n_electrons,
            ms2: 0,
            core_energy,
            h1,
            h2,
        };
        ham.check_symmetry()?;
        Ok(ham)
    }

    fn check_symmetry(&self) -> Result<()> {
        let n = self.n_spatial;
        for i in 0..n {
            for j in 0..n {
                if (self.h1(i, j) - self.h1(j, i)).abs() > SYMMETRY_TOL {
                    return Err(Error::Integrity(format!("h1 not symmetric at ({i},{j})")));
                }
                for k in 0..n {
                    for l in 0..n {
                        let v = self.h2(i, j, k, l);
                        for w in [self.h2(j, i, k, l), self.h2(i, j, l, k), self.h2(k, l, i, j)] {
                            if (v - w).abs() > SYMMETRY_TOL {
                                return Err(Error::Integrity(format!(
                                    "(ij|kl) symmetry broken at ({i}{j}|{k}{l})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn h1(&self, i: usize, j: usize) -> f64 {
        self.h1[i * self.n_spatial + j]
    }

    /// Chemist-notation `(ij|kl)`.
    pub fn h2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((i * n + j) * n + k) * n + l]
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Second-quantized Hamiltonian over interleaved spin orbitals:
    /// `Σ h_pq a_p†a_q + ½ Σ ⟨pq|rs⟩ a_p†a_q†a_s a_r` with `⟨pq|rs⟩ = (pr|qs)`.
    /// The core energy is returned separately.
    pub fn to_fermion_hamiltonian(&self) -> (FermionOperator, f64) {
        let n = self.n_spatial;
        let modes = 2 * n;
        let mut op = FermionOperator::new(modes);
        let so = |m: usize, spin: usize| 2 * m + spin;
        for i in 0..n {
            for j in 0..n {
                let v = self.h1(i, j);
                if v == 0.0 {
                    continue;
                }
                for spin in 0..2 {
                    op.push(LadderProduct::single(so(i, spin), so(j, spin), Complex64::new(v, 0.0)))
                        .expect("modes in range");
                }
            }
        }
        // p, r share spin s1; q, s share spin s2.
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, r, q, s);
                        if v == 0.0 {
                            continue;
                        }
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let (pp, qq, rr, ss) = (so(p, s1), so(q, s2), so(r, s1), so(s, s2));
                                if pp == qq || rr == ss {
                                    continue;
                                }
                                op.push(LadderProduct::double(pp, qq, ss, rr, Complex64::new(0.5 * v, 0.0)))
                                    .expect("modes in range");
                            }
                        }
                    }
                }
            }
        }
        (op, self.core_energy)
    }

    /// Jordan-Wigner image of the electronic Hamiltonian (core energy excluded).
    pub fn qubit_hamiltonian(&self) -> Result<PauliSum> {
        let (op, _) = self.to_fermion_hamiltonian();
        jordan_wigner(&op)
    }

    /// Canonical FCIDUMP text: one record per symmetry-unique nonzero integral,
    /// floats in shortest round-trip form.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        writeln!(
            out,
            " &FCI NORB={},NELEC={},MS2={},\n  ORBSYM={}\n  ISYM=1,\n &END",
            n,
            self.n_electrons,
            self.ms2,
            "1,".repeat(n)
        )
        .unwrap();
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let v = self.h2(i, j, k, l);
                        if v != 0.0 {
                            writeln!(out, "{:e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1).unwrap();
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.h1(i, j);
                if v != 0.0 {
                    writeln!(out, "{:e} {} {} 0 0", v, i + 1, j + 1).unwrap();
                }
            }
        }
        writeln!(out, "{:e} 0 0 0 0", self.core_energy).unwrap();
        out
    }
}

fn header_value<'a>(entries: &'a [(String, Vec<String>)], key: &str) -> Option<&'a [String]> {
    entries
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_slice())
}

/// Splits a namelist body such as `NORB=2,NELEC=2,ORBSYM=1,1,` into
/// `(key, values)` pairs; bare values attach to the preceding key.
fn parse_namelist(body: &str, line: usize) -> Result<Vec<(String, Vec<String>)>> {
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for raw in body.split([',', '\n']) {
        let tok = raw.trim();
        if tok.is_empty() {
            continue;
        }
        // A token may itself hold several whitespace-separated pieces.
        for piece in tok.split_whitespace() {
            if let Some((k, v)) = piece.split_once('=') {
                let k = k.trim().to_ascii_uppercase();
                if k.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: format!("empty key in header near '{piece}'"),
                    });
                }
                let mut vals = Vec::new();
                if !v.trim().is_empty() {
                    vals.push(v.trim().to_string());
                }
                entries.push((k, vals));
            } else {
                match entries.last_mut() {
                    Some((_, vals)) => vals.push(piece.to_string()),
                    None => {
                        return Err(Error::Parse {
                            line,
                            message: format!("unexpected token '{piece}' in header"),
                        })
                    }
                }
            }
        }
    }
    Ok(entries)
}

fn header_usize(entries: &[(String, Vec<String>)], key: &str, line: usize) -> Result<Option<usize>> {
    match header_value(entries, key) {
        None => Ok(None),
        Some([v]) => v.parse().map(Some).map_err(|_| Error::Parse {
            line,
            message: format!("{key} must be a non-negative integer, got '{v}'"),
        }),
        Some(_) => Err(Error::Parse {
            line,
            message: format!("{key} must have exactly one value"),
        }),
    }
}

struct IntegralStore {
    n: usize,
    h1: Vec<Option<f64>>,
    h2: Vec<Option<f64>>,
    core: Option<f64>,
}

impl IntegralStore {
    fn set(slot: &mut Option<f64>, v: f64, what: &str, line: usize) -> Result<()> {
        match slot {
            Some(old) if (*old - v).abs() > SYMMETRY_TOL => Err(Error::Integrity(format!(
                "line {line}: {what} = {v} conflicts with earlier value {old}"
            ))),
            _ => {
                *slot = Some(v);
                Ok(())
            }
        }
    }

    fn set_h1(&mut self, i: usize, j: usize, v: f64, line: usize) -> Result<()> {
        let n = self.n;
        for (a, b) in [(i, j), (j, i)] {
            Self::set(&mut self.h1[a * n + b], v, &format!("h1[{}][{}]", a + 1, b + 1), line)?;
        }
        Ok(())
    }

    fn set_h2(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64, line: usize) -> Result<()> {
        let n = self.n;
        let perms = [
            (i, j, k, l),
            (j, i, k, l),
            (i, j, l, k),
            (j, i, l, k),
            (k, l, i, j),
            (l, k, i, j),
            (k, l, j, i),
            (l, k, j, i),
        ];
        for (a, b, c, d) in perms {
            let what = format!("({}{}|{}{})", a + 1, b + 1, c + 1, d + 1);
            Self::set(&mut self.h2[((a * n + b) * n + c) * n + d], v, &what, line)?;
        }
        Ok(())
    }
}

/// Parses FCIDUMP text. ORBSYM and ISYM are read and ignored.
pub fn parse_fcidump(text: &str) -> Result<MolecularHamiltonian> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or(Error::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
    let first = lines[start].trim_start();
    if !first.to_ascii_uppercase().starts_with("&FCI") {
        return Err(Error::Parse {
            line: start + 1,
            message: "expected '&FCI' namelist header".into(),
        });
    }

    let mut body = String::new();
    let mut end = None;
    for (idx, raw) in lines.iter().enumerate().skip(start) {
        let mut l = raw.trim();
        if idx == start {
            l = l[4..].trim();
        }
        let upper = l.to_ascii_uppercase();
        let terminator = upper.find("&END").map(|p| (p, 4)).or_else(|| l.find('/').map(|p| (p, 1)));
        if let Some((pos, _)) = terminator {
            body.push_str(&l[..pos]);
            body.push('\n');
            end = Some(idx);
            break;
        }
        body.push_str(l);
        body.push('\n');
    }
    let end = end.ok_or(Error::Parse {
        line: lines.len(),
        message: "header not terminated by '&END' or '/'".into(),
    })?;

    let header_line = start + 1;
    let entries = parse_namelist(&body, header_line)?;
    let norb = header_usize(&entries, "NORB", header_line)?.ok_or(Error::Parse {
        line: header_line,
        message: "header is missing NORB".into(),
    })?;
    let nelec = header_usize(&entries, "NELEC", header_line)?.ok_or(Error::Parse {
        line: header_line,
        message: "header is missing NELEC".into(),
    })?;
    let ms2 = match header_value(&entries, "MS2") {
        None => 0,
        Some([v]) => v.parse::<i64>().map_err(|_| Error::Parse {
            line: header_line,
            message: format!("MS2 must be an integer, got '{v}'"),
        })?,
        Some(_) => {
            return Err(Error::Parse {
                line: header_line,
                message: "MS2 must have exactly one value".into(),
            })
        }
    };
    if norb == 0 {
        return Err(Error::Parse {
            line: header_line,
            message: "NORB must be positive".into(),
        });
    }

    let n = norb;
    let mut store = IntegralStore {
        n,
        h1: vec![None; n * n],
        h2: vec![None; n * n * n * n],
        core: None,
    };

    for (idx, raw) in lines.iter().enumerate().skip(end + 1) {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 'value i j k l', got {} fields", toks.len()),
            });
        }
        let value: f64 = toks[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!("bad float '{}'", toks[0]),
            })?;
        let mut idxs = [0usize; 4];
        for (slot, tok) in idxs.iter_mut().zip(&toks[1..]) {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad index '{tok}'"),
            })?;
            if v > n {
                return Err(Error::Parse {
                    line,
                    message: format!("index {v} outside [1, {n}]"),
                });
            }
            *slot = v;
        }
        match idxs {
            [0, 0, 0, 0] => IntegralStore::set(&mut store.core, value, "core energy", line)?,
            // Orbital energies; not needed to build the Hamiltonian.
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => store.set_h1(i - 1, j - 1, value, line)?,
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                store.set_h2(i - 1, j - 1, k - 1, l - 1, value, line)?
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("index pattern {idxs:?} is not a valid record"),
                })
            }
        }
    }

    let h1 = store.h1.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let h2 = store.h2.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let mut ham = MolecularHamiltonian::new(n, nelec, store.core.unwrap_or(0.0), h1, h2)?;
    ham.ms2 = ms2;
    Ok(ham)
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<MolecularHamiltonian> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse_fcidump(&text)?.with_label(label))
}
