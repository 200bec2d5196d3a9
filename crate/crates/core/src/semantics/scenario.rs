//! Scenario files: the finite configuration a model is checked against.
//!
//! A scenario is a small key-value text file fixing everything the process
//! text leaves open: the network tree, the value domains, the message-queue
//! bound, whether topology may change, the injection budget, and which
//! variables start with arbitrary values. One assignment per line, `#`
//! comments, order irrelevant:
//!
//! ```text
//! net = (1 : {2}) || ((2 : {1, 3}) || (3 : {2}))
//! data_max = 2
//! queue_bound = 2
//! topology = static
//! inject = [(3, 1, 2)]
//! arbitrary_vars = msg, num, sip
//! arbitrary = 0
//! ```
//!
//! The address universe is the set of net addresses plus every range member
//! plus anything listed under `addresses`; it drives connect/disconnect
//! enumeration and the address part of the message domain.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::Addr;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("scenario has no `net` line")]
    MissingNet,
    #[error("address {0} hosts two nodes in the net")]
    DuplicateAddress(Addr),
    #[error("injection source {0} is not a node of the net")]
    InjectSourceNotInNet(Addr),
    #[error("injection payload {data} exceeds data_max {max}")]
    InjectDataTooBig { data: u64, max: u64 },
    #[error("queue_bound must be at least 1")]
    ZeroQueueBound,
}

/// The parallel structure of the network: which addresses host a node and
/// with which transmission ranges, composed left/right as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetTree {
    Leaf { addr: Addr, range: BTreeSet<Addr> },
    Par(Box<NetTree>, Box<NetTree>),
}

impl NetTree {
    /// Node addresses in left-to-right order.
    pub fn addrs(&self) -> Vec<Addr> {
        let mut out = Vec::new();
        self.collect_addrs(&mut out);
        out
    }

    fn collect_addrs(&self, out: &mut Vec<Addr>) {
        match self {
            NetTree::Leaf { addr, .. } => out.push(*addr),
            NetTree::Par(l, r) => {
                l.collect_addrs(out);
                r.collect_addrs(out);
            }
        }
    }

    /// Every address mentioned anywhere in the tree, ranges included.
    pub fn mentioned(&self) -> BTreeSet<Addr> {
        let mut out = BTreeSet::new();
        self.collect_mentioned(&mut out);
        out
    }

    fn collect_mentioned(&self, out: &mut BTreeSet<Addr>) {
        match self {
            NetTree::Leaf { addr, range } => {
                out.insert(*addr);
                out.extend(range.iter().copied());
            }
            NetTree::Par(l, r) => {
                l.collect_mentioned(out);
                r.collect_mentioned(out);
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            NetTree::Leaf { addr, range } => {
                let rs: Vec<String> = range.iter().map(|a| a.to_string()).collect();
                format!("({} : {{{}}})", addr, rs.join(", "))
            }
            NetTree::Par(l, r) => format!("({} || {})", l.render(), r.render()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Static,
    Dynamic,
}

/// Whether each node runs the bare sequential process or the process read
/// through a message queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessShape {
    Seq,
    SeqQmsg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub net: NetTree,
    /// Net addresses, range members, and any `addresses` extras.
    pub universe: BTreeSet<Addr>,
    pub nat_max: u64,
    pub data_max: u64,
    pub queue_bound: usize,
    pub topology: Topology,
    pub shape: ProcessShape,
    /// Entry process name; defaults to the first process of the model.
    pub entry: Option<String>,
    /// Injection budget: each entry permits one newpkt(data, dst) handed to
    /// node `src`.
    pub inject: Vec<(Addr, u64, Addr)>,
    /// Variables whose initial value ranges over the arbitrary domain.
    pub arbitrary_vars: Vec<String>,
    /// The arbitrary domain: a set of seeds, each naming one initial value
    /// per variable type (see `Model::init_fragments`).
    pub arbitrary: Vec<u64>,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            src,
        }
    }

    fn err(&self, msg: impl Into<String>) -> ScenarioError {
        ScenarioError::Syntax {
            line: self.line,
            msg: format!("{} in `{}`", msg.into(), self.src.trim()),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ScenarioError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<u64, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn word(&mut self) -> Result<String, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn finish(&mut self) -> Result<(), ScenarioError> {
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }

    fn addr_set(&mut self) -> Result<BTreeSet<Addr>, ScenarioError> {
        self.expect('{')?;
        let mut out = BTreeSet::new();
        if !self.eat('}') {
            loop {
                out.insert(Addr(self.number()?));
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(out)
    }

    // tree := factor ('||' factor)*    left-associative
    fn net_tree(&mut self) -> Result<NetTree, ScenarioError> {
        let mut t = self.net_factor()?;
        while self.peek() == Some('|') {
            self.expect('|')?;
            self.expect('|')?;
            let r = self.net_factor()?;
            t = NetTree::Par(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    // factor := '(' tree ')' | addr ':' addr_set
    fn net_factor(&mut self) -> Result<NetTree, ScenarioError> {
        if self.eat('(') {
            let t = self.net_tree()?;
            self.expect(')')?;
            return Ok(t);
        }
        let addr = Addr(self.number()?);
        self.expect(':')?;
        let range = self.addr_set()?;
        Ok(NetTree::Leaf { addr, range })
    }

    fn inject_list(&mut self) -> Result<Vec<(Addr, u64, Addr)>, ScenarioError> {
        let bracketed = self.eat('[');
        let mut out = Vec::new();
        loop {
            if bracketed && self.eat(']') {
                break;
            }
            if self.peek().is_none() {
                if bracketed {
                    return Err(self.err("expected `]`"));
                }
                break;
            }
            self.expect('(')?;
            let src = Addr(self.number()?);
            self.expect(',')?;
            let data = self.number()?;
            self.expect(',')?;
            let dst = Addr(self.number()?);
            self.expect(')')?;
            out.push((src, data, dst));
            if !self.eat(',') && bracketed {
                self.expect(']')?;
                break;
            }
        }
        Ok(out)
    }

    fn number_list(&mut self) -> Result<Vec<u64>, ScenarioError> {
        let mut out = vec![self.number()?];
        while self.eat(',') {
            out.push(self.number()?);
        }
        Ok(out)
    }

    fn word_list(&mut self) -> Result<Vec<String>, ScenarioError> {
        let mut out = vec![self.word()?];
        while self.eat(',') {
            out.push(self.word()?);
        }
        Ok(out)
    }
}

/// Parse and validate a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut net: Option<NetTree> = None;
    let mut addresses: BTreeSet<Addr> = BTreeSet::new();
    let mut nat_max: u64 = 7;
    let mut data_max: u64 = 2;
    let mut queue_bound: usize = 2;
    let mut topology = Topology::Static;
    let mut shape = ProcessShape::SeqQmsg;
    let mut entry: Option<String> = None;
    let mut inject: Vec<(Addr, u64, Addr)> = Vec::new();
    let mut arbitrary_vars: Vec<String> = Vec::new();
    let mut arbitrary: Vec<u64> = vec![0];
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ScenarioError::Syntax {
                line: line_no,
                msg: format!("expected `key = value` in `{}`", line.trim()),
            });
        };
        let key = line[..eq].trim().to_string();
        let value = &line[eq + 1..];
        if !seen.insert(key.clone()) {
            return Err(ScenarioError::DuplicateKey {
                line: line_no,
                key,
            });
        }
        let mut cur = Cursor::new(value, line_no);
        match key.as_str() {
            "net" => {
                let t = cur.net_tree()?;
                cur.finish()?;
                net = Some(t);
            }
            "addresses" => {
                for n in cur.number_list()? {
                    addresses.insert(Addr(n));
                }
                cur.finish()?;
            }
            "nat_max" => {
                nat_max = cur.number()?;
                cur.finish()?;
            }
            "data_max" => {
                data_max = cur.number()?;
                cur.finish()?;
            }
            "queue_bound" => {
                queue_bound = cur.number()? as usize;
                cur.finish()?;
            }
            "topology" => {
                let w = cur.word()?;
                cur.finish()?;
                topology = match w.as_str() {
                    "static" => Topology::Static,
                    "dynamic" => Topology::Dynamic,
                    _ => {
                        return Err(ScenarioError::Syntax {
                            line: line_no,
                            msg: format!("topology must be static or dynamic, not `{w}`"),
                        })
                    }
                };
            }
            "process" => {
                let w = cur.word()?;
                cur.finish()?;
                shape = match w.as_str() {
                    "seq" => ProcessShape::Seq,
                    "seq_qmsg" => ProcessShape::SeqQmsg,
                    _ => {
                        return Err(ScenarioError::Syntax {
                            line: line_no,
                            msg: format!("process must be seq or seq_qmsg, not `{w}`"),
                        })
                    }
                };
            }
            "entry" => {
                entry = Some(cur.word()?);
                cur.finish()?;
            }
            "inject" => {
                inject = cur.inject_list()?;
                cur.finish()?;
            }
            "arbitrary_vars" => {
                arbitrary_vars = cur.word_list()?;
                cur.finish()?;
            }
            "arbitrary" => {
                arbitrary = cur.number_list()?;
                cur.finish()?;
                arbitrary.sort_unstable();
                arbitrary.dedup();
            }
            _ => {
                return Err(ScenarioError::UnknownKey {
                    line: line_no,
                    key,
                });
            }
        }
    }

    let net = net.ok_or(ScenarioError::MissingNet)?;
    if queue_bound == 0 {
        return Err(ScenarioError::ZeroQueueBound);
    }
    let node_addrs = net.addrs();
    {
        let mut seen_addrs = BTreeSet::new();
        for a in &node_addrs {
            if !seen_addrs.insert(*a) {
                return Err(ScenarioError::DuplicateAddress(*a));
            }
        }
    }
    for (src, data, _dst) in &inject {
        if !node_addrs.contains(src) {
            return Err(ScenarioError::InjectSourceNotInNet(*src));
        }
        if *data > data_max {
            return Err(ScenarioError::InjectDataTooBig {
                data: *data,
                max: data_max,
            });
        }
    }
    let mut universe = net.mentioned();
    universe.extend(addresses);

    Ok(Scenario {
        net,
        universe,
        nat_max,
        data_max,
        queue_bound,
        topology,
        shape,
        entry,
        inject,
        arbitrary_vars,
        arbitrary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_line_parses_with_nested_parallel() {
        let s = parse_scenario(
            "net = (1 : {2}) || ((2 : {1, 3}) || (3 : {2}))\n\
             data_max = 2\n\
             queue_bound = 2\n",
        )
        .unwrap();
        assert_eq!(
            s.net.addrs(),
            vec![Addr(1), Addr(2), Addr(3)],
        );
        // Left-to-right shape is preserved, not rebalanced.
        match &s.net {
            NetTree::Par(l, r) => {
                assert!(matches!(**l, NetTree::Leaf { addr: Addr(1), .. }));
                assert!(matches!(**r, NetTree::Par(_, _)));
            }
            _ => panic!("expected a parallel composition"),
        }
        assert_eq!(s.universe, BTreeSet::from([Addr(1), Addr(2), Addr(3)]));
    }

    #[test]
    fn defaults_cover_everything_but_the_net() {
        let s = parse_scenario("net = 1 : {}\n").unwrap();
        assert_eq!(s.nat_max, 7);
        assert_eq!(s.data_max, 2);
        assert_eq!(s.queue_bound, 2);
        assert_eq!(s.topology, Topology::Static);
        assert_eq!(s.shape, ProcessShape::SeqQmsg);
        assert!(s.inject.is_empty());
        assert_eq!(s.arbitrary, vec![0]);
    }

    #[test]
    fn injection_budget_is_an_ordered_list_of_triples() {
        let s = parse_scenario("net = (3 : {2}) || (2 : {3})\ninject = [(3, 1, 2), (3, 2, 1)]\n")
            .unwrap();
        assert_eq!(
            s.inject,
            vec![(Addr(3), 1, Addr(2)), (Addr(3), 2, Addr(1))]
        );
    }

    #[test]
    fn injection_source_must_host_a_node() {
        let e = parse_scenario("net = 1 : {}\ninject = [(2, 0, 1)]\n").unwrap_err();
        assert_eq!(e, ScenarioError::InjectSourceNotInNet(Addr(2)));
    }

    #[test]
    fn injection_payload_respects_data_max() {
        let e = parse_scenario("net = 1 : {}\ndata_max = 2\ninject = [(1, 3, 1)]\n").unwrap_err();
        assert_eq!(e, ScenarioError::InjectDataTooBig { data: 3, max: 2 });
    }

    #[test]
    fn duplicate_node_addresses_are_rejected() {
        let e = parse_scenario("net = (1 : {}) || (1 : {})\n").unwrap_err();
        assert_eq!(e, ScenarioError::DuplicateAddress(Addr(1)));
    }

    #[test]
    fn ranges_join_the_universe() {
        let s = parse_scenario("net = 1 : {7}\naddresses = 9\n").unwrap();
        assert_eq!(s.universe, BTreeSet::from([Addr(1), Addr(7), Addr(9)]));
    }

    #[test]
    fn unknown_keys_are_flagged_with_their_line() {
        let e = parse_scenario("net = 1 : {}\nqueue_depth = 3\n").unwrap_err();
        assert_eq!(
            e,
            ScenarioError::UnknownKey {
                line: 2,
                key: "queue_depth".into()
            }
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let s = parse_scenario("# line network\n\nnet = 1 : {2} # one node\n").unwrap();
        assert_eq!(s.net.addrs(), vec![Addr(1)]);
    }
}
