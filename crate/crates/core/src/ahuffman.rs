//! One-pass adaptive Huffman coding (FGK).
//!
//! Both ends start from a tree holding only the NYT ("not yet transmitted")
//! leaf. A symbol seen before is sent as its current root-to-leaf path
//! (left = 0, right = 1); a new symbol is sent as the NYT path followed by its
//! 8-bit literal, MSB first. After each symbol both ends run the same update,
//! so the trees never diverge.
//!
//! Tree conventions:
//! - node numbers double as slot indices; the root is always `MAX_NODES - 1`;
//! - NYT splits into a new NYT (left, lower number) and the new leaf (right);
//! - before a node's weight is incremented it is swapped with the
//!   highest-numbered node of equal weight, unless that node is its parent.

use bitvec::prelude::*;

use crate::error::{Error, Result};

const SYMBOLS: usize = 256;
const MAX_NODES: usize = 2 * (SYMBOLS + 1) - 1;
const ROOT: usize = MAX_NODES - 1;

/// A sequence of bits, not necessarily byte aligned.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitString(BitVec<u8, Msb0>);

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).map(|b| *b)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().by_vals()
    }

    /// Bits packed MSB first, zero padded to a whole byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bits = self.0.clone();
        bits.set_uninitialized(false);
        bits.into_vec()
    }

    /// Takes the first `bit_len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Result<Self> {
        if bit_len > bytes.len() * 8 {
            return Err(Error::CorruptStream(format!(
                "{bit_len} bits requested from {} bytes",
                bytes.len()
            )));
        }
        let mut bits = BitVec::<u8, Msb0>::from_slice(bytes);
        bits.truncate(bit_len);
        Ok(BitString(bits))
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(Error::CorruptStream(format!("{other:?} is not a bit"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Nyt,
    Leaf(u8),
    Internal { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    weight: u64,
    parent: Option<usize>,
    kind: NodeKind,
}

/// FGK tree state shared by the encoder and decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTree {
    nodes: Vec<Option<Node>>,
    nyt: usize,
    leaf_of: [Option<usize>; SYMBOLS],
}

impl Default for HuffmanTree {
    fn default() -> Self {
        Self::new()
    }
}

impl HuffmanTree {
    pub fn new() -> Self {
        let mut nodes = vec![None; MAX_NODES];
        nodes[ROOT] = Some(Node {
            weight: 0,
            parent: None,
            kind: NodeKind::Nyt,
        });
        HuffmanTree {
            nodes,
            nyt: ROOT,
            leaf_of: [None; SYMBOLS],
        }
    }

    fn node(&self, number: usize) -> &Node {
        self.nodes[number].as_ref().expect("live node")
    }

    fn node_mut(&mut self, number: usize) -> &mut Node {
        self.nodes[number].as_mut().expect("live node")
    }

    /// Number of distinct symbols seen so far.
    pub fn distinct_symbols(&self) -> usize {
        self.leaf_of.iter().flatten().count()
    }

    /// Occurrences of `symbol` processed so far.
    pub fn weight_of(&self, symbol: u8) -> u64 {
        self.leaf_of[symbol as usize].map_or(0, |n| self.node(n).weight)
    }

    pub fn total_weight(&self) -> u64 {
        self.node(ROOT).weight
    }

    fn path_to(&self, mut number: usize, out: &mut BitString) {
        let start = out.len();
        while let Some(parent) = self.node(number).parent {
            let is_right = matches!(self.node(parent).kind, NodeKind::Internal { right, .. } if right == number);
            out.push(is_right);
            number = parent;
        }
        out.0[start..].reverse();
    }

    /// Highest-numbered node with the same weight as `number`. Live nodes are
    /// contiguous from the NYT up to the root and sorted by weight.
    fn block_leader(&self, number: usize) -> usize {
        let weight = self.node(number).weight;
        let mut leader = number;
        while leader + 1 < MAX_NODES && self.node(leader + 1).weight == weight {
            leader += 1;
        }
        leader
    }

    /// Exchanges the subtrees rooted at slots `a` and `b`.
    fn swap(&mut self, a: usize, b: usize) {
        let (pa, pb) = (self.node(a).parent, self.node(b).parent);
        self.nodes.swap(a, b);
        self.node_mut(a).parent = pa;
        self.node_mut(b).parent = pb;
        for slot in [a, b] {
            match self.node(slot).kind {
                NodeKind::Internal { left, right } => {
                    self.node_mut(left).parent = Some(slot);
                    self.node_mut(right).parent = Some(slot);
                }
                NodeKind::Leaf(sym) => self.leaf_of[sym as usize] = Some(slot),
                NodeKind::Nyt => self.nyt = slot,
            }
        }
    }

    /// Splits the NYT leaf and returns the new symbol leaf.
    fn spawn(&mut self, symbol: u8) -> usize {
        let old = self.nyt;
        let (new_nyt, leaf) = (old - 2, old - 1);
        self.nodes[new_nyt] = Some(Node {
            weight: 0,
            parent: Some(old),
            kind: NodeKind::Nyt,
        });
        self.nodes[leaf] = Some(Node {
            weight: 0,
            parent: Some(old),
            kind: NodeKind::Leaf(symbol),
        });
        self.node_mut(old).kind = NodeKind::Internal {
            left: new_nyt,
            right: leaf,
        };
        self.nyt = new_nyt;
        self.leaf_of[symbol as usize] = Some(leaf);
        leaf
    }

    /// Records one occurrence of `symbol`.
    pub fn update(&mut self, symbol: u8) {
        let mut current = match self.leaf_of[symbol as usize] {
            Some(leaf) => leaf,
            None => self.spawn(symbol),
        };
        loop {
            let leader = self.block_leader(current);
            if leader != current && Some(leader) != self.node(current).parent {
                self.swap(current, leader);
                current = leader;
            }
            self.node_mut(current).weight += 1;
            match self.node(current).parent {
                Some(parent) => current = parent,
                None => break,
            }
        }
    }

    /// Appends the code for `symbol` under the current tree.
    pub fn encode_symbol(&self, symbol: u8, out: &mut BitString) {
        match self.leaf_of[symbol as usize] {
            Some(leaf) => self.path_to(leaf, out),
            None => {
                self.path_to(self.nyt, out);
                for i in (0..8).rev() {
                    out.push(symbol >> i & 1 == 1);
                }
            }
        }
    }

    /// True iff the numbering/weight invariants hold: weights are
    /// non-decreasing in node number, every node is numbered below its parent,
    /// internal weights are the sum of their children, there is exactly one
    /// NYT leaf of weight zero and the symbol map points at matching leaves.
    pub fn check_sibling_property(&self) -> bool {
        let mut prev_weight = 0;
        let mut nyt_count = 0;
        for (number, slot) in self.nodes.iter().enumerate() {
            let Some(node) = slot else {
                if number >= self.nyt {
                    return false;
                }
                continue;
            };
            if node.weight < prev_weight {
                return false;
            }
            prev_weight = node.weight;
            match node.parent {
                Some(p) if p <= number || self.nodes[p].is_none() => return false,
                None if number != ROOT => return false,
                _ => {}
            }
            match node.kind {
                NodeKind::Nyt => {
                    nyt_count += 1;
                    if node.weight != 0 || number != self.nyt {
                        return false;
                    }
                }
                NodeKind::Leaf(sym) => {
                    if self.leaf_of[sym as usize] != Some(number) {
                        return false;
                    }
                }
                NodeKind::Internal { left, right } => {
                    let (Some(l), Some(r)) = (&self.nodes[left], &self.nodes[right]) else {
                        return false;
                    };
                    if l.parent != Some(number)
                        || r.parent != Some(number)
                        || l.weight + r.weight != node.weight
                    {
                        return false;
                    }
                }
            }
        }
        nyt_count == 1
    }
}

pub fn check_sibling_property(tree: &HuffmanTree) -> bool {
    tree.check_sibling_property()
}

/// Incremental encoder.
#[derive(Debug, Clone, Default)]
pub struct Encoder {
    tree: HuffmanTree,
    bits: BitString,
    symbols: u64,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, symbol: u8) {
        self.tree.encode_symbol(symbol, &mut self.bits);
        self.tree.update(symbol);
        self.symbols += 1;
    }

    pub fn tree(&self) -> &HuffmanTree {
        &self.tree
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn finish(self) -> BitString {
        self.bits
    }
}

/// Incremental decoder over a complete bit string.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    tree: HuffmanTree,
    bits: &'a BitString,
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Decoder {
            tree: HuffmanTree::new(),
            bits,
            pos: 0,
        }
    }

    fn next_bit(&mut self) -> Result<bool> {
        let bit = self
            .bits
            .get(self.pos)
            .ok_or_else(|| Error::CorruptStream(format!("bits exhausted at {}", self.pos)))?;
        self.pos += 1;
        Ok(bit)
    }

    pub fn next_symbol(&mut self) -> Result<u8> {
        let mut number = ROOT;
        let symbol = loop {
            match self.tree.node(number).kind {
                NodeKind::Internal { left, right } => {
                    number = if self.next_bit()? { right } else { left };
                }
                NodeKind::Leaf(sym) => break sym,
                NodeKind::Nyt => {
                    let mut sym = 0u8;
                    for _ in 0..8 {
                        sym = sym << 1 | self.next_bit()? as u8;
                    }
                    break sym;
                }
            }
        };
        self.tree.update(symbol);
        Ok(symbol)
    }

    pub fn tree(&self) -> &HuffmanTree {
        &self.tree
    }

    /// Errors unless every bit was consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.bits.len() {
            return Err(Error::CorruptStream(format!(
                "{} trailing bits after the last symbol",
                self.bits.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub fn encode(data: &[u8]) -> BitString {
    let mut enc = Encoder::new();
    for &b in data {
        enc.push(b);
    }
    enc.finish()
}

pub fn decode(bits: &BitString, symbol_count: u64) -> Result<Vec<u8>> {
    let mut dec = Decoder::new(bits);
    let mut out = Vec::with_capacity(symbol_count.min(1 << 20) as usize);
    for _ in 0..symbol_count {
        out.push(dec.next_symbol()?);
    }
    dec.finish()?;
    Ok(out)
}

const FILE_HEADER: usize = 16;

/// Standalone compressed-file form: symbol count (u64 BE), bit length
/// (u64 BE), then the bits packed MSB first.
pub fn to_file_bytes(bits: &BitString, symbol_count: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(FILE_HEADER + bits.len().div_ceil(8));
    out.extend_from_slice(&symbol_count.to_be_bytes());
    out.extend_from_slice(&(bits.len() as u64).to_be_bytes());
    out.extend_from_slice(&bits.to_bytes());
    out
}

pub fn from_file_bytes(bytes: &[u8]) -> Result<(BitString, u64)> {
    if bytes.len() < FILE_HEADER {
        return Err(Error::Parse(
            "compressed file shorter than its header".into(),
        ));
    }
    let symbol_count = u64::from_be_bytes(bytes[0..8].try_into().expect("8 bytes"));
    let bit_len = u64::from_be_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let payload = &bytes[FILE_HEADER..];
    if bit_len.div_ceil(8) != payload.len() as u64 {
        return Err(Error::Parse(format!(
            "{bit_len} bits do not match a {}-byte payload",
            payload.len()
        )));
    }
    Ok((
        BitString::from_bytes(payload, bit_len as usize)?,
        symbol_count,
    ))
}

pub fn compress_file(data: &[u8]) -> Vec<u8> {
    to_file_bytes(&encode(data), data.len() as u64)
}

pub fn decompress_file(bytes: &[u8]) -> Result<Vec<u8>> {
    let (bits, count) = from_file_bytes(bytes)?;
    decode(&bits, count)
}
