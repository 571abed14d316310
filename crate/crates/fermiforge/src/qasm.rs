//! OpenQASM 2.0 export and import for the gate subset
//! {h, x, y, z, s, sdg, t, tdg, rx, ry, rz, cx, cz, swap, measure}.

use std::fmt::Write;

use fermiforge_core::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QasmError {
    #[error("gate {0} has no OpenQASM 2.0 translation")]
    Untranslatable(String),
    #[error("gate {name} has unbound parameter '{symbol}'")]
    Unbound { name: String, symbol: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> QasmError {
    QasmError::Syntax {
        line,
        message: message.into(),
    }
}

/// QASM mnemonic, parameter count and qubit count for an IR gate name.
fn export_name(name: &str) -> Option<(&'static str, bool, usize)> {
    Some(match name {
        "H" => ("h", false, 1),
        "X" => ("x", false, 1),
        "Y" => ("y", false, 1),
        "Z" => ("z", false, 1),
        "S" => ("s", false, 1),
        "SDAG" => ("sdg", false, 1),
        "T" => ("t", false, 1),
        "TDAG" => ("tdg", false, 1),
        "RX" => ("rx", true, 1),
        "RY" => ("ry", true, 1),
        "RZ" => ("rz", true, 1),
        "CNOT" | "CX" => ("cx", false, 2),
        "CZ" => ("cz", false, 2),
        "SWAP" => ("swap", false, 2),
        _ => return None,
    })
}

pub fn to_qasm(c: &Circuit) -> Result<String, QasmError> {
    let width = c.width().max(1);
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{width}];\ncreg c[{width}];");
    for g in c.gates() {
        if g.name() == "MEASURE" && g.controls().is_empty() && g.targets().len() == 1 {
            let q = g.targets()[0];
            let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
            continue;
        }
        let (mnemonic, has_param, arity) =
            export_name(g.name()).ok_or_else(|| QasmError::Untranslatable(g.name().to_string()))?;
        let qubits: Vec<usize> = g.qubits().collect();
        let shape_ok = qubits.len() == arity
            && match g.name() {
                "SWAP" => g.controls().is_empty(),
                "CNOT" | "CX" | "CZ" => g.controls().len() == 1,
                _ => g.controls().is_empty(),
            };
        if !shape_ok {
            return Err(QasmError::Untranslatable(format!(
                "{} with {} control(s) and {} target(s)",
                g.name(),
                g.controls().len(),
                g.targets().len()
            )));
        }
        out.push_str(mnemonic);
        if has_param {
            let v = g
                .parameter_value()
                .map_err(|_| unbound(g))?
                .ok_or_else(|| unbound(g))?;
            let _ = write!(out, "({v:.16e})");
        }
        let args: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
        let _ = writeln!(out, " {};", args.join(","));
    }
    Ok(out)
}

fn unbound(g: &Gate) -> QasmError {
    let symbol = match &g.parameter {
        Some(fermiforge_core::Parameter::Symbol(s)) => s.clone(),
        _ => String::from("<missing>"),
    };
    QasmError::Unbound {
        name: g.name().to_string(),
        symbol,
    }
}

/// Statements with the line each one starts on; `//` comments removed.
fn statements(doc: &str) -> Result<Vec<(usize, String)>, QasmError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, raw) in doc.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if current.trim().is_empty() && !ch.is_whitespace() {
                start = i + 1;
            }
            if ch == ';' {
                out.push((start, current.trim().to_string()));
                current.clear();
            } else {
                current.push(ch);
            }
        }
        current.push(' ');
    }
    if !current.trim().is_empty() {
        return Err(syntax(
            start,
            format!("statement '{}' is missing ';'", current.trim()),
        ));
    }
    Ok(out)
}

pub fn from_qasm(doc: &str) -> Result<Circuit, QasmError> {
    let stmts = statements(doc)?;
    let mut iter = stmts.into_iter();
    match iter.next() {
        Some((line, s)) => {
            let version = s.strip_prefix("OPENQASM").map(str::trim);
            match version {
                Some("2.0") => {}
                Some(v) if v.starts_with('3') => {
                    return Err(syntax(
                        line,
                        "OpenQASM 3 is not supported; only OpenQASM 2.0 input is accepted",
                    ))
                }
                _ => return Err(syntax(line, "expected 'OPENQASM 2.0;' header")),
            }
        }
        None => return Err(syntax(1, "empty document")),
    }

    let mut qreg: Option<(String, usize)> = None;
    let mut creg: Option<String> = None;
    let mut gates = Vec::new();
    for (line, s) in iter {
        if s.is_empty() {
            continue;
        }
        let (head, rest) = split_head(&s);
        match head {
            "include" => {}
            "barrier" => {}
            "qreg" => {
                if qreg.is_some() {
                    return Err(syntax(line, "only one quantum register is supported"));
                }
                qreg = Some(register(rest, line)?);
            }
            "creg" => {
                if creg.is_some() {
                    return Err(syntax(line, "only one classical register is supported"));
                }
                creg = Some(register(rest, line)?.0);
            }
            "measure" => {
                let (q, c) = rest
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "measure needs 'q[i] -> c[j]'"))?;
                let q = qubit_ref(q, qreg.as_ref(), line)?;
                let (cname, _) = index_ref(c, line)?;
                if creg.as_deref() != Some(cname.as_str()) {
                    return Err(syntax(
                        line,
                        format!("unknown classical register '{cname}'"),
                    ));
                }
                gates.push(Gate::single("MEASURE", q));
            }
            "gate" | "opaque" | "if" | "reset" | "OPENQASM" => {
                return Err(syntax(line, format!("unsupported statement '{head}'")));
            }
            _ => gates.push(gate_statement(&s, qreg.as_ref(), line)?),
        }
    }
    let width = qreg.map(|(_, n)| n);
    let mut c = Circuit::new(gates);
    c.set_declared_width(width);
    Ok(c)
}

/// First identifier of a statement and the remainder.
fn split_head(s: &str) -> (&str, &str) {
    let end = s
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(s.len());
    (&s[..end], s[end..].trim())
}

fn index_ref(s: &str, line: usize) -> Result<(String, usize), QasmError> {
    let s = s.trim();
    let open = s
        .find('[')
        .ok_or_else(|| syntax(line, format!("expected indexed register, got '{s}'")))?;
    let close = s
        .strip_suffix(']')
        .ok_or_else(|| syntax(line, format!("unterminated index in '{s}'")))?;
    let index = close[open + 1..]
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("bad index in '{s}'")))?;
    Ok((s[..open].trim().to_string(), index))
}

fn register(rest: &str, line: usize) -> Result<(String, usize), QasmError> {
    index_ref(rest, line)
}

fn qubit_ref(s: &str, qreg: Option<&(String, usize)>, line: usize) -> Result<usize, QasmError> {
    let (name, index) = index_ref(s, line)?;
    let (reg, size) = qreg.ok_or_else(|| syntax(line, "gate used before 'qreg' declaration"))?;
    if &name != reg {
        return Err(syntax(line, format!("unknown quantum register '{name}'")));
    }
    if index >= *size {
        return Err(syntax(
            line,
            format!("qubit {index} is outside {reg}[{size}]"),
        ));
    }
    Ok(index)
}

fn gate_statement(s: &str, qreg: Option<&(String, usize)>, line: usize) -> Result<Gate, QasmError> {
    let (name, mut rest) = split_head(s);
    let (ir, needs_param, arity) = match name {
        "h" => ("H", false, 1),
        "x" => ("X", false, 1),
        "y" => ("Y", false, 1),
        "z" => ("Z", false, 1),
        "s" => ("S", false, 1),
        "sdg" => ("SDAG", false, 1),
        "t" => ("T", false, 1),
        "tdg" => ("TDAG", false, 1),
        "rx" => ("RX", true, 1),
        "ry" => ("RY", true, 1),
        "rz" => ("RZ", true, 1),
        "cx" => ("CNOT", false, 2),
        "cz" => ("CZ", false, 2),
        "swap" => ("SWAP", false, 2),
        other => return Err(syntax(line, format!("unsupported gate '{other}'"))),
    };
    let mut param = None;
    if let Some(after) = rest.strip_prefix('(') {
        let close = matching_paren(after).ok_or_else(|| syntax(line, "unbalanced parentheses"))?;
        param = Some(eval_expr(&after[..close]).map_err(|m| syntax(line, m))?);
        rest = after[close + 1..].trim();
    }
    let qubits: Vec<usize> = rest
        .split(',')
        .map(|a| qubit_ref(a, qreg, line))
        .collect::<Result<_, _>>()?;
    if needs_param != param.is_some() {
        let what = if needs_param { "needs" } else { "takes no" };
        return Err(syntax(line, format!("gate '{name}' {what} parameter")));
    }
    if qubits.len() != arity {
        return Err(syntax(
            line,
            format!(
                "gate '{name}' acts on {arity} qubit(s), got {}",
                qubits.len()
            ),
        ));
    }
    let gate = match name {
        "cx" | "cz" => Gate::new(ir, &qubits[1..], &qubits[..1]),
        _ => Gate::new(ir, &qubits, &[]),
    }
    .map_err(|e| syntax(line, e.to_string()))?;
    Ok(match param {
        Some(v) => gate.with_parameter(v),
        None => gate,
    })
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return Some(i),
            ')' => depth -= 1,
            _ => {}
        }
    }
    None
}

/// Evaluates a parameter expression: numbers, `pi`, `+ - * /`, unary minus
/// and parentheses.
pub fn eval_expr(src: &str) -> Result<f64, String> {
    let tokens = tokenize(src)?;
    let mut p = ExprParser {
        tokens: &tokens,
        pos: 0,
    };
    let v = p.sum()?;
    if p.pos != tokens.len() {
        return Err(format!("unexpected token in expression '{src}'"));
    }
    if !v.is_finite() {
        return Err(format!("expression '{src}' is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(
                text.parse().map_err(|_| format!("bad number '{text}'"))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word != "pi" {
                return Err(format!("unknown identifier '{word}' in expression"));
            }
            out.push(Tok::Num(std::f64::consts::PI));
        } else {
            return Err(format!("unexpected character '{c}' in expression"));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: &'a [Tok],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == '*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.tokens.get(self.pos) {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(*v)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err("missing ')' in expression".into());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err("incomplete expression".into()),
        }
    }
}
