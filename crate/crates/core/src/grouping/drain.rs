use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{sort_by_first_member, Grouper, GrouperConfig, Members};
use crate::anonymize::is_pure_number;
use crate::error::Result;
use crate::model::{tokenize, GroupId, LogGroup, LogRecord, Template, Token};

#[derive(Debug, Default)]
struct Node {
    children: BTreeMap<String, usize>,
    wildcard: Option<usize>,
    clusters: Vec<usize>,
}

#[derive(Debug)]
struct Cluster {
    template: Vec<Token>,
    members: Members,
}

impl Cluster {
    /// (equal positions / length, wildcard positions)
    fn similarity(&self, tokens: &[Token]) -> (f64, usize) {
        let mut equal = 0usize;
        let mut wildcards = 0usize;
        for (t, tok) in self.template.iter().zip(tokens) {
            match t {
                Token::Variable => wildcards += 1,
                Token::Constant(_) if t == tok => equal += 1,
                Token::Constant(_) => {}
            }
        }
        (equal as f64 / tokens.len() as f64, wildcards)
    }

    fn absorb(&mut self, tokens: &[Token]) {
        for (t, tok) in self.template.iter_mut().zip(tokens) {
            if t != tok {
                *t = Token::Variable;
            }
        }
    }
}

/// Fixed-depth prefix tree grouper.
///
/// The first layer splits on token count, the next `tree_depth - 2` layers
/// on leading tokens (pure numbers take the wildcard branch), and the leaf
/// picks the cluster with the highest positional similarity.
#[derive(Debug)]
pub struct DrainGrouper {
    token_layers: usize,
    threshold: f64,
    max_children: usize,
    roots: HashMap<usize, usize>,
    nodes: Vec<Node>,
    clusters: Vec<Cluster>,
}

impl DrainGrouper {
    pub fn new(cfg: &GrouperConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(DrainGrouper {
            token_layers: cfg.tree_depth - 2,
            threshold: cfg.similarity_threshold,
            max_children: cfg.max_children,
            roots: HashMap::new(),
            nodes: Vec::new(),
            clusters: Vec::new(),
        })
    }

    fn routing_tokens<'t>(&self, tokens: &'t [Token]) -> &'t [Token] {
        &tokens[..tokens.len().min(self.token_layers)]
    }

    /// Walks the tree without modifying it.
    fn search(&self, tokens: &[Token]) -> Option<usize> {
        let mut node = *self.roots.get(&tokens.len())?;
        for tok in self.routing_tokens(tokens) {
            let n = &self.nodes[node];
            let named = match tok {
                Token::Constant(s) if !is_pure_number(s) => n.children.get(s.as_str()).copied(),
                _ => None,
            };
            node = named.or(n.wildcard)?;
        }
        Some(node)
    }

    fn new_node(&mut self) -> usize {
        self.nodes.push(Node::default());
        self.nodes.len() - 1
    }

    /// Walks the tree, creating nodes as needed, and returns the leaf.
    fn insert_path(&mut self, tokens: &[Token]) -> usize {
        let mut node = match self.roots.get(&tokens.len()) {
            Some(&n) => n,
            None => {
                let n = self.new_node();
                self.roots.insert(tokens.len(), n);
                n
            }
        };
        let depth = tokens.len().min(self.token_layers);
        for tok in &tokens[..depth] {
            node = self.child_for(node, tok);
        }
        node
    }

    fn child_for(&mut self, node: usize, tok: &Token) -> usize {
        let key = match tok {
            Token::Constant(s) if !is_pure_number(s) => Some(s.as_str()),
            _ => None,
        };
        if let Some(key) = key {
            if let Some(&child) = self.nodes[node].children.get(key) {
                return child;
            }
            // one slot stays reserved for the wildcard child
            if self.nodes[node].children.len() + 1 < self.max_children {
                let child = self.new_node();
                self.nodes[node].children.insert(String::from(key), child);
                return child;
            }
        }
        match self.nodes[node].wildcard {
            Some(child) => child,
            None => {
                let child = self.new_node();
                self.nodes[node].wildcard = Some(child);
                child
            }
        }
    }

    fn best_cluster(&self, leaf: usize, tokens: &[Token]) -> Option<usize> {
        let mut best: Option<(usize, f64, usize)> = None;
        for &c in &self.nodes[leaf].clusters {
            let (sim, wildcards) = self.clusters[c].similarity(tokens);
            let better = match best {
                None => true,
                Some((_, bs, bw)) => sim > bs || (sim == bs && wildcards > bw),
            };
            if better {
                best = Some((c, sim, wildcards));
            }
        }
        best.filter(|&(_, sim, _)| sim >= self.threshold)
            .map(|(c, _, _)| c)
    }
}

impl Grouper for DrainGrouper {
    fn feed(&mut self, record: &LogRecord) -> Result<GroupId> {
        let tokens = tokenize(&record.content)?;
        let found = self
            .search(&tokens)
            .and_then(|leaf| self.best_cluster(leaf, &tokens));
        let idx = match found {
            Some(c) => {
                self.clusters[c].absorb(&tokens);
                c
            }
            None => {
                let leaf = self.insert_path(&tokens);
                let c = self.clusters.len();
                self.clusters.push(Cluster {
                    template: tokens,
                    members: Members::new(GroupId(c as u32)),
                });
                self.nodes[leaf].clusters.push(c);
                c
            }
        };
        self.clusters[idx].members.push(record);
        Ok(self.clusters[idx].members.id)
    }

    fn finalize(self) -> Vec<LogGroup> {
        let mut groups: Vec<LogGroup> = self
            .clusters
            .into_iter()
            .map(|c| c.members.into_group(Template::new(c.template)))
            .collect();
        sort_by_first_member(&mut groups);
        groups
    }
}
