//! OpenQASM 2.0 subset: one quantum register, straight-line gate
//! applications, `measure`, and ignorable `barrier`/`creg`/`include`.

use std::fmt::Write as _;

use super::{Circuit, GateKind};
use crate::error::ParseError;

const ONE_QUBIT: &[&str] = &[
    "h", "x", "y", "z", "s", "t", "sdg", "tdg", "rx", "ry", "rz", "u1", "u2", "u3", "u", "U", "id",
    "p", "sx",
];
const TWO_QUBIT: &[&str] = &[
    "cx", "CX", "cz", "cy", "ch", "cu1", "cp", "crz", "rzz", "rxx", "ms",
];

fn param_count(label: &str) -> usize {
    match label {
        "rx" | "ry" | "rz" | "u1" | "p" => 1,
        "u2" => 2,
        "u3" | "u" | "U" => 3,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Real,
    Str,
    Arrow,
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(2, &mut i);
                out.push(Token { tok: Tok::Arrow, line: tl, col: tc });
            }
            '"' => {
                advance(1, &mut i);
                while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                    advance(1, &mut i);
                }
                if chars.get(i) != Some(&'"') {
                    return Err(err(tl, tc, "unterminated string"));
                }
                advance(1, &mut i);
                out.push(Token { tok: Tok::Str, line: tl, col: tc });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    advance(1, &mut i);
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(word), line: tl, col: tc });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut real = false;
                while i < chars.len() {
                    let d = chars[i];
                    if d.is_ascii_digit() {
                        advance(1, &mut i);
                    } else if d == '.' {
                        real = true;
                        advance(1, &mut i);
                    } else if (d == 'e' || d == 'E') && i > start {
                        real = true;
                        advance(1, &mut i);
                        if matches!(chars.get(i), Some('+') | Some('-')) {
                            advance(1, &mut i);
                        }
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let tok = if real {
                    Tok::Real
                } else {
                    Tok::Int(
                        text.parse()
                            .map_err(|_| err(tl, tc, format!("integer `{text}` out of range")))?,
                    )
                };
                out.push(Token { tok, line: tl, col: tc });
            }
            ';' | ',' | '[' | ']' | '(' | ')' | '{' | '}' | '+' | '-' | '*' | '/' | '^' | '=' | '>'
            | '<' | '!' => {
                advance(1, &mut i);
                out.push(Token { tok: Tok::Sym(c), line: tl, col: tc });
            }
            other => return Err(err(tl, tc, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Register {
    name: String,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    qreg: Option<Register>,
    circuit: Option<Circuit>,
}

/// A qubit operand: either one qubit or the whole register.
enum Operand {
    One(usize),
    All,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let (l, c) = self.end;
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| err(l, c, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_sym(&mut self, s: char) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok == Tok::Sym(s) {
            Ok(())
        } else {
            Err(err(t.line, t.col, format!("expected `{s}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(err(t.line, t.col, "expected identifier")),
        }
    }

    fn expect_int(&mut self) -> Result<(usize, usize, usize), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(v) => Ok((v, t.line, t.col)),
            _ => Err(err(t.line, t.col, "expected integer")),
        }
    }

    fn eat_sym(&mut self, s: char) -> bool {
        if self.peek().map(|t| &t.tok) == Some(&Tok::Sym(s)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_params(&mut self) -> Result<(), ParseError> {
        let mut depth = 1;
        while depth > 0 {
            let t = self.next()?;
            match t.tok {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => depth -= 1,
                Tok::Sym(';') => return Err(err(t.line, t.col, "unbalanced parentheses")),
                _ => {}
            }
        }
        Ok(())
    }

    fn qubit_operand(&mut self) -> Result<Operand, ParseError> {
        let (name, line, col) = self.expect_ident()?;
        let reg = self
            .qreg
            .as_ref()
            .ok_or_else(|| err(line, col, "qubit used before any qreg declaration"))?;
        if name != reg.name {
            return Err(err(line, col, format!("unknown quantum register `{name}`")));
        }
        let size = reg.size;
        if self.eat_sym('[') {
            let (idx, l, c) = self.expect_int()?;
            if idx >= size {
                return Err(err(
                    l,
                    c,
                    format!("qubit index {idx} out of range for register `{name}[{size}]`"),
                ));
            }
            self.expect_sym(']')?;
            Ok(Operand::One(idx))
        } else {
            Ok(Operand::All)
        }
    }

    fn classical_operand(&mut self) -> Result<(), ParseError> {
        self.expect_ident()?;
        if self.eat_sym('[') {
            self.expect_int()?;
            self.expect_sym(']')?;
        }
        Ok(())
    }

    fn push(&mut self, kind: GateKind, qubits: Vec<usize>, at: (usize, usize)) -> Result<(), ParseError> {
        let circuit = self.circuit.as_mut().expect("qreg declared before operands resolve");
        circuit
            .push(kind, qubits)
            .map(|_| ())
            .map_err(|e| err(at.0, at.1, e.to_string()))
    }

    fn expand(&self, op: Operand) -> Vec<usize> {
        match op {
            Operand::One(q) => vec![q],
            Operand::All => (0..self.qreg.as_ref().map_or(0, |r| r.size)).collect(),
        }
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (word, line, col) = self.expect_ident()?;
        match word.as_str() {
            "OPENQASM" => {
                let t = self.next()?;
                if !matches!(t.tok, Tok::Real | Tok::Int(_)) {
                    return Err(err(t.line, t.col, "expected version number"));
                }
                self.expect_sym(';')
            }
            "include" => {
                let t = self.next()?;
                if t.tok != Tok::Str {
                    return Err(err(t.line, t.col, "expected file name string"));
                }
                self.expect_sym(';')
            }
            "qreg" => {
                if self.qreg.is_some() {
                    return Err(err(line, col, "only a single qreg is supported"));
                }
                let (name, ..) = self.expect_ident()?;
                self.expect_sym('[')?;
                let (size, ..) = self.expect_int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                self.circuit = Some(Circuit::new(size));
                self.qreg = Some(Register { name, size });
                Ok(())
            }
            "creg" => {
                self.expect_ident()?;
                self.expect_sym('[')?;
                self.expect_int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')
            }
            "barrier" => {
                self.qubit_operand()?;
                while self.eat_sym(',') {
                    self.qubit_operand()?;
                }
                self.expect_sym(';')
            }
            "measure" => {
                let q = self.qubit_operand()?;
                let t = self.next()?;
                if t.tok != Tok::Arrow {
                    return Err(err(t.line, t.col, "expected `->`"));
                }
                self.classical_operand()?;
                self.expect_sym(';')?;
                for q in self.expand(q) {
                    self.push(GateKind::Measure, vec![q], (line, col))?;
                }
                Ok(())
            }
            "if" => Err(err(line, col, "classical control (`if`) is not supported")),
            "gate" | "opaque" => Err(err(line, col, format!("`{word}` definitions are not supported"))),
            "reset" => Err(err(line, col, "`reset` is not supported")),
            name => self.gate(name.to_string(), line, col),
        }
    }

    fn gate(&mut self, name: String, line: usize, col: usize) -> Result<(), ParseError> {
        let arity = if ONE_QUBIT.contains(&name.as_str()) {
            1
        } else if TWO_QUBIT.contains(&name.as_str()) || name == "swap" {
            2
        } else {
            return Err(err(line, col, format!("unknown gate `{name}`")));
        };
        if self.eat_sym('(') {
            self.skip_params()?;
        }
        let mut operands = vec![self.qubit_operand()?];
        while self.eat_sym(',') {
            operands.push(self.qubit_operand()?);
        }
        self.expect_sym(';')?;
        if operands.len() != arity {
            return Err(err(
                line,
                col,
                format!("gate `{name}` takes {arity} qubit(s), got {}", operands.len()),
            ));
        }
        if arity == 1 {
            let q = operands.pop().expect("one operand");
            for q in self.expand(q) {
                self.push(GateKind::OneQubit(name.clone()), vec![q], (line, col))?;
            }
            return Ok(());
        }
        let (a, b) = match (&operands[0], &operands[1]) {
            (Operand::One(a), Operand::One(b)) => (*a, *b),
            _ => {
                return Err(err(
                    line,
                    col,
                    "register broadcast is not supported for two-qubit gates",
                ))
            }
        };
        let reps = if name == "swap" { 3 } else { 1 };
        for _ in 0..reps {
            self.push(GateKind::TwoQubit, vec![a, b], (line, col))?;
        }
        Ok(())
    }
}

pub fn parse_qasm(text: &str) -> Result<Circuit, ParseError> {
    let toks = lex(text)?;
    let end = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        qreg: None,
        circuit: None,
    };
    while p.peek().is_some() {
        if p.eat_sym(';') {
            continue;
        }
        p.statement()?;
    }
    p.circuit
        .ok_or_else(|| err(end.0, end.1, "program declares no qreg"))
}

/// Renders a circuit as OpenQASM 2.0. Two-qubit ops are written as `cx`,
/// rotation angles as zero; [`parse_qasm`] reads the result back unchanged.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let n = circuit.num_qubits();
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];");
    if circuit.ops().iter().any(|op| op.kind == GateKind::Measure) {
        let _ = writeln!(out, "creg c[{n}];");
    }
    for op in circuit.ops() {
        match &op.kind {
            GateKind::OneQubit(label) => {
                let k = param_count(label);
                if k > 0 {
                    let zeros = vec!["0"; k].join(",");
                    let _ = writeln!(out, "{label}({zeros}) q[{}];", op.qubits[0]);
                } else {
                    let _ = writeln!(out, "{label} q[{}];", op.qubits[0]);
                }
            }
            GateKind::TwoQubit => {
                let _ = writeln!(out, "cx q[{}],q[{}];", op.qubits[0], op.qubits[1]);
            }
            GateKind::Measure => {
                let q = op.qubits[0];
                let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_basic_gates() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.ops()[0].kind, GateKind::OneQubit("h".into()));
        assert_eq!(c.ops()[0].qubits, vec![0]);
        assert_eq!(c.ops()[1].kind, GateKind::TwoQubit);
        assert_eq!(c.ops()[1].qubits, vec![0, 1]);
    }

    #[test]
    fn measure_without_creg() {
        let c = parse_qasm("qreg q[1]; measure q[0] -> c[0];").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.ops()[0].kind, GateKind::Measure);
    }

    #[test]
    fn swap_expands_to_three_ms() {
        let c = parse_qasm("qreg q[2]; swap q[0],q[1];").unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.ops().iter().all(|op| op.is_two_qubit() && op.qubits == vec![0, 1]));
    }

    #[test]
    fn header_params_comments_and_broadcast() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// comment\nqreg q[3];\ncreg c[3];\n\
                   rz(pi/2) q[1];\nu3(0.1, -2e-3, pi) q[2];\nh q;\nbarrier q;\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.len(), 2 + 3 + 3);
        assert_eq!(c.ops()[0].kind, GateKind::OneQubit("rz".into()));
    }

    #[test]
    fn unknown_gate_reports_position() {
        let e = parse_qasm("qreg q[2];\n  foo q[0];").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(e.message.contains("foo"));
    }

    #[test]
    fn index_out_of_range() {
        let e = parse_qasm("qreg q[2];\ncx q[0],q[5];").unwrap_err();
        assert_eq!((e.line, e.col), (2, 11));
    }

    #[test]
    fn rejects_second_qreg_and_control_flow() {
        let e = parse_qasm("qreg q[2];\nqreg r[2];").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_qasm("qreg q[1];\ncreg c[1];\nif(c==1) x q[0];").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("classical control"));
    }

    #[test]
    fn rejects_gate_after_measure() {
        let e = parse_qasm("qreg q[1];\nmeasure q[0] -> c[0];\nh q[0];").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn rejects_repeated_two_qubit_operand() {
        assert!(parse_qasm("qreg q[2]; cx q[1],q[1];").is_err());
    }

    #[test]
    fn emit_empty_has_no_gate_lines() {
        let text = emit_qasm(&Circuit::new(3));
        assert!(text.contains("qreg q[3];"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn emitted_text_reparses() {
        let mut c = Circuit::new(3);
        c.one_qubit("rx", 0).unwrap();
        c.one_qubit("u2", 1).unwrap();
        c.two_qubit(2, 0).unwrap();
        c.measure(1).unwrap();
        assert_eq!(parse_qasm(&emit_qasm(&c)).unwrap(), c);
    }
}
