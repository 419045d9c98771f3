//! Line-based circuit text format.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! input <name>
//! const <name> = <int>
//! add <name> = <name> <name> ...
//! mul <name> = <name> <name>
//! output <name>
//! ```

use std::collections::HashMap;

use super::{Circuit, Gate};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit = Circuit::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut output: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "input" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| err(lineno, "input needs a name"))?;
                if tokens.next().is_some() {
                    return Err(err(lineno, "trailing tokens after input name"));
                }
                define(&mut names, name, lineno)?;
                let var = circuit.var_names.len();
                circuit.var_names.push(name.to_string());
                let id = push_named(&mut circuit, Gate::Input(var), name);
                names.insert(name.to_string(), id);
            }
            "const" | "add" | "mul" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| err(lineno, format!("{keyword} needs a name")))?;
                if tokens.next() != Some("=") {
                    return Err(err(lineno, format!("expected `=` after {keyword} name")));
                }
                define(&mut names, name, lineno)?;
                let gate = match keyword {
                    "const" => {
                        let lit = tokens
                            .next()
                            .ok_or_else(|| err(lineno, "const needs an integer"))?;
                        if tokens.next().is_some() {
                            return Err(err(lineno, "trailing tokens after const value"));
                        }
                        let value: u64 = lit
                            .parse()
                            .map_err(|_| err(lineno, format!("`{lit}` is not a non-negative integer")))?;
                        Gate::Const(value)
                    }
                    "add" => {
                        let children = resolve_all(&names, tokens, lineno)?;
                        if children.is_empty() {
                            return Err(err(lineno, "add fan-in must be at least 1"));
                        }
                        Gate::Add(children)
                    }
                    _ => {
                        let children = resolve_all(&names, tokens, lineno)?;
                        if children.len() != 2 {
                            return Err(err(
                                lineno,
                                format!("mul fan-in must be exactly 2, got {}", children.len()),
                            ));
                        }
                        Gate::Mul(children[0], children[1])
                    }
                };
                let id = push_named(&mut circuit, gate, name);
                names.insert(name.to_string(), id);
            }
            "output" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| err(lineno, "output needs a gate name"))?;
                if output.is_some() {
                    return Err(err(lineno, "duplicate output statement"));
                }
                let id = *names
                    .get(name)
                    .ok_or_else(|| err(lineno, format!("reference to undefined gate `{name}`")))?;
                output = Some(id);
            }
            other => return Err(err(lineno, format!("unknown statement `{other}`"))),
        }
    }

    circuit.output = output.ok_or_else(|| err(text.lines().count(), "missing output statement"))?;
    Ok(circuit)
}

fn define(names: &mut HashMap<String, usize>, name: &str, lineno: usize) -> Result<()> {
    if name.is_empty() || name == "=" || name.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(err(lineno, format!("invalid gate name `{name}`")));
    }
    if names.contains_key(name) {
        return Err(err(lineno, format!("duplicate definition of `{name}`")));
    }
    Ok(())
}

fn resolve_all<'a>(
    names: &HashMap<String, usize>,
    tokens: impl Iterator<Item = &'a str>,
    lineno: usize,
) -> Result<Vec<usize>> {
    tokens
        .map(|t| {
            names
                .get(t)
                .copied()
                .ok_or_else(|| err(lineno, format!("reference to undefined gate `{t}`")))
        })
        .collect()
}

fn push_named(circuit: &mut Circuit, gate: Gate, name: &str) -> usize {
    let id = circuit.gates.len();
    circuit.gates.push(gate);
    circuit.gate_names.push(name.to_string());
    id
}

/// Deterministic canonical serialization: gates in stored (topological)
/// order, then the output line.
pub fn serialize_circuit(circuit: &Circuit) -> Result<String> {
    if circuit.gates.is_empty() {
        return Err(Error::Validation("cannot serialize an empty circuit".into()));
    }
    if circuit.output >= circuit.gates.len() {
        return Err(Error::Validation("output refers to a missing gate".into()));
    }
    let mut out = String::new();
    for (id, gate) in circuit.gates.iter().enumerate() {
        let name = &circuit.gate_names[id];
        match gate {
            Gate::Input(_) => out.push_str(&format!("input {name}\n")),
            Gate::Const(c) => out.push_str(&format!("const {name} = {c}\n")),
            Gate::Add(cs) => {
                let refs: Vec<&str> =
                    cs.iter().map(|&c| circuit.gate_names[c].as_str()).collect();
                out.push_str(&format!("add {name} = {}\n", refs.join(" ")));
            }
            Gate::Mul(a, b) => out.push_str(&format!(
                "mul {name} = {} {}\n",
                circuit.gate_names[*a], circuit.gate_names[*b]
            )),
        }
    }
    out.push_str(&format!("output {}\n", circuit.gate_names[circuit.output]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X1X2: &str = "input x1\ninput x2\nmul g3 = x1 x2\noutput g3\n";

    #[test]
    fn parse_product() {
        let c = parse_circuit(X1X2).unwrap();
        assert_eq!(c.gates.len(), 3);
        assert_eq!(c.n_vars(), 2);
        assert!(matches!(c.gates[2], Gate::Mul(0, 1)));
    }

    #[test]
    fn roundtrip() {
        let c = parse_circuit(X1X2).unwrap();
        let text = serialize_circuit(&c).unwrap();
        assert_eq!(text, X1X2);
        let c2 = parse_circuit(&text).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn dangling_reference() {
        let text = "input x1\nmul g2 = x1 g9\noutput g2\n";
        let e = parse_circuit(text).unwrap_err();
        assert!(e.to_string().contains("g9"), "{e}");
    }

    #[test]
    fn mul_fan_in_enforced() {
        let text = "input x1\ninput x2\ninput x3\nmul g = x1 x2 x3\noutput g\n";
        assert!(parse_circuit(text).is_err());
    }

    #[test]
    fn missing_output() {
        assert!(parse_circuit("input x1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# product\ninput x1\n\ninput x2  # second\nmul g = x1 x2\noutput g\n";
        assert!(parse_circuit(text).is_ok());
    }

    #[test]
    fn empty_circuit_serialization_fails() {
        assert!(serialize_circuit(&Circuit::new()).is_err());
    }
}
