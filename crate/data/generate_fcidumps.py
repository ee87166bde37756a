"""Regenerate the FCIDUMP files under data/ with PySCF (STO-3G).

H2 is dumped in its full two-orbital space. NaH and KH are dumped as a
frozen-core CAS(2,2) over the sigma/sigma* pair around the HOMO/LUMO.
A reference.csv with PySCF's own FCI/CASCI energy is written next to each
set so the Rust oracle can be cross-checked against an independent solver.

    python3 data/generate_fcidumps.py
"""

import os

import numpy as np
from pyscf import fci, gto, mcscf, scf
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))


def grid(lo, hi, step=0.1):
    n = int(round((hi - lo) / step))
    return [round(lo + k * step, 2) for k in range(n + 1)]


def h2(r):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="sto-3g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    path = os.path.join(HERE, "h2", f"h2_{r:.2f}.fcidump")
    fcidump.from_scf(mf, path)
    e_fci = fci.FCI(mf).kernel()[0]
    return path, mf.e_tot, e_fci


def cas22(atom, r, name):
    mol = gto.M(atom=f"{atom} 0 0 0; H 0 0 {r}", basis="sto-3g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    mc = mcscf.CASCI(mf, 2, 2)
    e_cas = mc.kernel()[0]
    path = os.path.join(HERE, name, f"{name}_{r:.2f}.fcidump")
    fcidump.from_mcscf(mc, path)
    return path, mf.e_tot, e_cas


def run(name, points, fn):
    os.makedirs(os.path.join(HERE, name), exist_ok=True)
    rows = []
    for r in points:
        _, e_hf, e_ref = fn(r)
        rows.append((r, e_hf, e_ref))
        print(f"{name} r={r:.2f} E_HF={e_hf:.10f} E_ref={e_ref:.10f}")
    with open(os.path.join(HERE, name, "reference.csv"), "w") as f:
        f.write("label,hf_energy,reference_energy\n")
        for r, e_hf, e_ref in rows:
            f.write(f"{r:.2f},{e_hf:.12f},{e_ref:.12f}\n")


if __name__ == "__main__":
    run("h2", grid(0.5, 2.5), h2)
    run("nah", grid(1.2, 3.0), lambda r: cas22("Na", r, "nah"))
    run("kh", grid(1.8, 3.6), lambda r: cas22("K", r, "kh"))
