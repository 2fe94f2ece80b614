//! Parenthesized tree text: `IF(v0, f0, (v1 XOR f1))`.
//!
//! Binary operators are infix inside parentheses, `NOT(x)` and `IF(a, b, c)`
//! are prefix calls, leaves are `v<j>` and `f<i>`. Population dumps are one
//! tree per line.

use crate::error::{Error, Result};

use super::{GpNode, GpTree, Primitive, TerminalSet};

pub fn serialize_tree(tree: &GpTree) -> String {
    let mut out = String::new();
    write_node(&tree.to_node(), &mut out);
    out
}

fn write_node(node: &GpNode, out: &mut String) {
    match node.prim {
        Primitive::Var(j) => {
            out.push('v');
            out.push_str(&j.to_string());
        }
        Primitive::Seed(i) => {
            out.push('f');
            out.push_str(&i.to_string());
        }
        Primitive::Not => {
            out.push_str("NOT(");
            write_node(&node.children[0], out);
            out.push(')');
        }
        Primitive::If => {
            out.push_str("IF(");
            for (k, c) in node.children.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_node(c, out);
            }
            out.push(')');
        }
        op => {
            out.push('(');
            write_node(&node.children[0], out);
            out.push(' ');
            out.push_str(op.keyword());
            out.push(' ');
            write_node(&node.children[1], out);
            out.push(')');
        }
    }
}

pub fn parse_tree(text: &str, terms: &TerminalSet) -> Result<GpTree> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, terms };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(GpTree::from_node(&node))
}

/// Parses newline-delimited trees, skipping blank lines and `#` comments.
pub fn parse_tree_list(text: &str, terms: &TerminalSet) -> Result<Vec<GpTree>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_tree(l, terms))
        .collect()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    terms: &'a TerminalSet,
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected '{}'", c as char))
        }
    }

    fn word(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let src: &'a [u8] = self.src;
        let s = std::str::from_utf8(&src[start..self.pos]).expect("ascii slice");
        (start, s)
    }

    fn expr(&mut self) -> Result<GpNode> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            let lhs = self.expr()?;
            let (at, op) = self.word();
            let prim = match op {
                "OR" => Primitive::Or,
                "XOR" => Primitive::Xor,
                "AND" => Primitive::And,
                "AND2" => Primitive::And2,
                "XNOR" => Primitive::Xnor,
                other => {
                    self.pos = at;
                    return self.fail(format!("expected binary operator, found {other:?}"));
                }
            };
            let rhs = self.expr()?;
            self.expect(b')')?;
            return Ok(GpNode::new(prim, vec![lhs, rhs]));
        }
        let (at, word) = self.word();
        match word {
            "NOT" => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(GpNode::new(Primitive::Not, vec![inner]))
            }
            "IF" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b',')?;
                let c = self.expr()?;
                self.expect(b')')?;
                Ok(GpNode::new(Primitive::If, vec![a, b, c]))
            }
            "" => self.fail("expected expression"),
            leaf => {
                let prim = self.leaf(leaf).map_err(|msg| Error::Parse { pos: at, msg })?;
                Ok(GpNode::leaf(prim))
            }
        }
    }

    fn leaf(&self, word: &str) -> std::result::Result<Primitive, String> {
        let (kind, digits) = word.split_at(1);
        let idx: u8 = digits
            .parse()
            .map_err(|_| format!("unknown terminal {word:?}"))?;
        let (prim, bound) = match kind {
            "v" => (Primitive::Var(idx), self.terms.vars),
            "f" => (Primitive::Seed(idx), self.terms.seeds),
            _ => return Err(format!("unknown terminal {word:?}")),
        };
        if usize::from(idx) >= bound {
            return Err(format!(
                "terminal {word} out of range (vars={}, seeds={})",
                self.terms.vars, self.terms.seeds
            ));
        }
        Ok(prim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::random_tree;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) const TABLE4: [&str; 8] = [
        "IF(v0, f0, (v1 XOR f1))",
        "IF(v0, f0, (f1 XOR v1))",
        "IF(v0, f1, ((v1 XOR f0) OR (v1 AND v0)))",
        "IF(v1, f1, (f0 XOR v0))",
        "IF(NOT(NOT(v0)), NOT((f0 XOR NOT(v1))), f1)",
        "IF(v1, (v0 XOR (f1 AND v1)), IF(v1, (f2 OR (f2 AND (f2 OR f3))), f0))",
        "IF(v0, (f1 XOR v1), ((((f0 OR f3) AND2 IF(f3, f2, v1)) AND v0) OR f3))",
        "IF(v0, (v0 AND2 f1), ((v0 AND ((f2 XOR v1) XOR f3)) XOR (NOT(f0) XOR IF((v0 XNOR v1), v1, v0))))",
    ];

    #[test]
    fn parses_smallest_construction() {
        use Primitive::*;
        let t = parse_tree("IF(v0, f0, (v1 XOR f1))", &TerminalSet::new(2, 2)).unwrap();
        assert_eq!(t.nodes(), &[If, Var(0), Seed(0), Xor, Var(1), Seed(1)]);
    }

    #[test]
    fn table4_round_trip_and_sizes() {
        let terms = TerminalSet::new(2, 4);
        let sizes = [6, 6, 10, 6, 10, 17, 17, 22];
        for (text, size) in TABLE4.iter().zip(sizes) {
            let t = parse_tree(text, &terms).unwrap();
            assert_eq!(t.size(), size, "{text}");
            assert_eq!(serialize_tree(&t), *text);
        }
    }

    #[test]
    fn out_of_range_and_syntax_errors() {
        let terms = TerminalSet::new(2, 4);
        assert!(matches!(parse_tree("f9", &terms), Err(Error::Parse { pos: 0, .. })));
        assert!(parse_tree("g0", &terms).is_err());
        assert!(parse_tree("(v0 NAND v1)", &terms).is_err());
        assert!(parse_tree("IF(v0, v1)", &terms).is_err());
        assert!(parse_tree("v0 v1", &terms).is_err());
        let err = parse_tree("(v0 XOR v1", &terms).unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 10, .. }), "{err}");
    }

    #[test]
    fn tolerant_whitespace() {
        let terms = TerminalSet::new(2, 2);
        let a = parse_tree("  IF( v0 ,f0,(v1   XOR f1) ) ", &terms).unwrap();
        assert_eq!(serialize_tree(&a), "IF(v0, f0, (v1 XOR f1))");
    }

    #[test]
    fn tree_list() {
        let terms = TerminalSet::new(2, 2);
        let list = parse_tree_list("# runs\nv0\n\nIF(v0, f0, f1)\n", &terms).unwrap();
        assert_eq!(list.len(), 2);
    }

    proptest! {
        #[test]
        fn round_trip_random_trees(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let terms = TerminalSet::new(2, 4);
            let t = random_tree(&terms, 5, &mut rng);
            let text = serialize_tree(&t);
            prop_assert_eq!(parse_tree(&text, &terms).unwrap(), t);
        }
    }
}
