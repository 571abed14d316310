//! Molecular geometries and XYZ parsing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::FragmentError;

const ELEMENTS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Atomic number of a symbol, case-insensitive.
pub fn atomic_number(symbol: &str) -> Option<usize> {
    ELEMENTS
        .iter()
        .position(|e| e.eq_ignore_ascii_case(symbol))
        .map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    /// Cartesian position in Ångström.
    pub position: [f64; 3],
}

impl Atom {
    pub fn new(symbol: &str, position: [f64; 3]) -> Result<Atom, FragmentError> {
        let z = atomic_number(symbol)
            .ok_or_else(|| FragmentError::UnknownElement(symbol.to_string()))?;
        Ok(Atom {
            symbol: ELEMENTS[z - 1].to_string(),
            position,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Geometry {
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub charge: i64,
    /// Number of unpaired electrons.
    #[serde(default)]
    pub spin: i64,
}

impl Geometry {
    pub fn new(atoms: Vec<Atom>) -> Geometry {
        Geometry {
            atoms,
            charge: 0,
            spin: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn validate(&self) -> Result<(), FragmentError> {
        for (i, a) in self.atoms.iter().enumerate() {
            if atomic_number(&a.symbol).is_none() {
                return Err(FragmentError::UnknownElement(a.symbol.clone()));
            }
            if !a.position.iter().all(|x| x.is_finite()) {
                return Err(FragmentError::NonFinite(i));
            }
        }
        Ok(())
    }

    pub fn n_electrons(&self) -> i64 {
        let z: usize = self
            .atoms
            .iter()
            .filter_map(|a| atomic_number(&a.symbol))
            .sum();
        z as i64 - self.charge
    }

    /// XYZ text with a count line and a comment line.
    pub fn to_xyz(&self, comment: &str) -> String {
        let mut s = alloc::format!("{}\n{}\n", self.atoms.len(), comment);
        for a in &self.atoms {
            let [x, y, z] = a.position;
            s.push_str(&alloc::format!(
                "{:<2} {x:>14.8} {y:>14.8} {z:>14.8}\n",
                a.symbol
            ));
        }
        s
    }
}

fn parse_row(line: &str, lineno: usize) -> Result<Atom, FragmentError> {
    let err = |message: String| FragmentError::Xyz {
        line: lineno,
        message,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(err(alloc::format!(
            "expected 'El x y z', got {} fields",
            fields.len()
        )));
    }
    let mut pos = [0.0f64; 3];
    for (k, f) in fields[1..].iter().enumerate() {
        pos[k] = f
            .parse()
            .map_err(|_| err(alloc::format!("bad coordinate '{f}'")))?;
        if !pos[k].is_finite() {
            return Err(err(alloc::format!("non-finite coordinate '{f}'")));
        }
    }
    Atom::new(fields[0], pos).map_err(|e| err(e.to_string()))
}

/// Parses standard XYZ (count line, comment line, atom rows) or a bare list
/// of atom rows. Blank lines after the atoms are ignored.
pub fn parse_xyz(text: &str) -> Result<Geometry, FragmentError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut start = 0;
    let mut expected = None;
    if let Some(&(_, first)) = lines.iter().find(|(_, l)| !l.trim().is_empty()) {
        if let Ok(n) = first.trim().parse::<usize>() {
            expected = Some(n);
            let idx = lines
                .iter()
                .position(|(_, l)| !l.trim().is_empty())
                .unwrap_or(0);
            start = idx + 2;
        }
    }
    let mut atoms = Vec::new();
    for &(lineno, line) in lines.iter().skip(start) {
        if line.trim().is_empty() {
            continue;
        }
        atoms.push(parse_row(line, lineno)?);
    }
    if let Some(n) = expected {
        if n != atoms.len() {
            return Err(FragmentError::Xyz {
                line: 1,
                message: alloc::format!(
                    "header declares {n} atoms but {} rows follow",
                    atoms.len()
                ),
            });
        }
    }
    Ok(Geometry::new(atoms))
}
