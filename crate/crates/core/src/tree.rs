//! Delivery over a rooted tree: server at the root, routers inside, one
//! user cache per leaf.
//!
//! Routers forward whole messages without re-encoding. A message goes down
//! link `(u, v)` iff it is useful to some user below `v`: a coded message
//! for subset `S` when `S` meets the users under `v`, a file combination
//! when someone under `v` requests that file.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decode::{Decoder, LocalCache, UserOutcome, VerifyReport};
use crate::delivery::message_targets;
use crate::error::{Error, Result};
use crate::model::{CacheContents, DemandVector, FileStore, Transcript, UserSet, MAX_USERS};

/// One entry of the topology document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: u64,
    pub parent: Option<u64>,
    /// One-based user id for leaves, `null` for the server and routers.
    pub user: Option<usize>,
}

/// Topology document: `{"nodes":[{"id":..,"parent":..|null,"user":..|null}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub nodes: Vec<NodeEntry>,
}

/// A validated rooted tree.
#[derive(Debug, Clone)]
pub struct TreeNetwork {
    ids: Vec<u64>,
    index: HashMap<u64, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    user: Vec<Option<usize>>,
    below: Vec<UserSet>,
    leaf_of_user: Vec<usize>,
    root: usize,
}

impl TreeNetwork {
    pub fn from_json(json: &str) -> Result<Self> {
        let doc: TopologyDoc =
            serde_json::from_str(json).map_err(|e| Error::MalformedTree(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &TopologyDoc) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedTree(msg));
        let count = doc.nodes.len();
        let mut index = HashMap::with_capacity(count);
        for (i, node) in doc.nodes.iter().enumerate() {
            if index.insert(node.id, i).is_some() {
                return bad(format!("duplicate node id {}", node.id));
            }
        }
        let mut roots = doc.nodes.iter().filter(|n| n.parent.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some(r), None) => index[&r.id],
            (None, _) => return bad("no root (node with null parent)".into()),
            (Some(_), Some(_)) => return bad("more than one root".into()),
        };

        let mut parent = vec![None; count];
        let mut children = vec![Vec::new(); count];
        for (i, node) in doc.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                let Some(&pi) = index.get(&p) else {
                    return bad(format!("node {} has unknown parent {p}", node.id));
                };
                parent[i] = Some(pi);
                children[pi].push(i);
            }
        }

        // every node must reach the root without revisiting
        for start in 0..count {
            let (mut at, mut steps) = (start, 0);
            while let Some(p) = parent[at] {
                at = p;
                steps += 1;
                if steps > count {
                    return bad(format!("cycle through node {}", doc.nodes[start].id));
                }
            }
        }

        let mut user = vec![None; count];
        let mut users_seen = Vec::new();
        for (i, node) in doc.nodes.iter().enumerate() {
            match (node.user, children[i].is_empty()) {
                (Some(_), _) if i == root => return bad("the root cannot be a user".into()),
                (Some(0), _) => return bad("user ids are one-based".into()),
                (Some(u), true) => {
                    user[i] = Some(u - 1);
                    users_seen.push(u - 1);
                }
                (Some(u), false) => return bad(format!("user {u} is not at a leaf")),
                (None, true) if i != root => {
                    return bad(format!("leaf {} carries no user", node.id))
                }
                (None, _) => {}
            }
        }
        let k = users_seen.len();
        if k == 0 {
            return bad("tree has no users".into());
        }
        if k > MAX_USERS {
            return Err(Error::TooManyUsers {
                users: k,
                max: MAX_USERS,
            });
        }
        let mut leaf_of_user = vec![usize::MAX; k];
        for (i, u) in user.iter().enumerate() {
            if let Some(u) = *u {
                if u >= k || leaf_of_user[u] != usize::MAX {
                    return bad(format!("users must be exactly 1..={k}"));
                }
                leaf_of_user[u] = i;
            }
        }

        let mut below = vec![UserSet::EMPTY; count];
        for (u, &leaf) in leaf_of_user.iter().enumerate() {
            let mut at = Some(leaf);
            while let Some(i) = at {
                below[i] = below[i].with(u);
                at = parent[i];
            }
        }

        Ok(Self {
            ids: doc.nodes.iter().map(|n| n.id).collect(),
            index,
            parent,
            children,
            user,
            below,
            leaf_of_user,
            root,
        })
    }

    pub fn to_doc(&self) -> TopologyDoc {
        TopologyDoc {
            nodes: (0..self.ids.len())
                .map(|i| NodeEntry {
                    id: self.ids[i],
                    parent: self.parent[i].map(|p| self.ids[p]),
                    user: self.user[i].map(|u| u + 1),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("topology serializes")
    }

    /// Server, one router, and `k` leaves behind it: a single shared link.
    pub fn shared_link(k: usize) -> Result<Self> {
        let mut nodes = vec![
            NodeEntry { id: 0, parent: None, user: None },
            NodeEntry { id: 1, parent: Some(0), user: None },
        ];
        nodes.extend((1..=k).map(|u| NodeEntry {
            id: 1 + u as u64,
            parent: Some(1),
            user: Some(u),
        }));
        Self::from_doc(&TopologyDoc { nodes })
    }

    /// Server with `k` orthogonal links, one per user.
    pub fn star(k: usize) -> Result<Self> {
        let mut nodes = vec![NodeEntry { id: 0, parent: None, user: None }];
        nodes.extend((1..=k).map(|u| NodeEntry {
            id: u as u64,
            parent: Some(0),
            user: Some(u),
        }));
        Self::from_doc(&TopologyDoc { nodes })
    }

    pub fn num_users(&self) -> usize {
        self.leaf_of_user.len()
    }

    pub fn root_id(&self) -> u64 {
        self.ids[self.root]
    }

    /// Ids of every node in document order.
    pub fn node_ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn parent_of(&self, id: u64) -> Result<Option<u64>> {
        let i = self.node(id)?;
        Ok(self.parent[i].map(|p| self.ids[p]))
    }

    fn node(&self, id: u64) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownNode(id))
    }

    /// Links `(parent id, child id)` in document order of the child.
    pub fn links(&self) -> Vec<(u64, u64)> {
        (0..self.ids.len())
            .filter_map(|i| self.parent[i].map(|p| (self.ids[p], self.ids[i])))
            .collect()
    }
}

/// Users at or below node `id`.
pub fn descendant_leaves(tree: &TreeNetwork, id: u64) -> Result<UserSet> {
    Ok(tree.below[tree.node(id)?])
}

/// How a router decides which outgoing links carry a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForwardRule {
    /// Forward iff at least one target lies below the link.
    Useful,
    /// Forward everything.
    Flood,
    /// Forward iff at least this many targets lie below the link.
    MinOverlap(usize),
}

impl ForwardRule {
    fn forwards(self, targets: UserSet, below: UserSet) -> bool {
        match self {
            ForwardRule::Useful => targets.intersects(below),
            ForwardRule::Flood => true,
            ForwardRule::MinOverlap(t) => targets.intersection(below).len() >= t,
        }
    }
}

/// Bits carried by one directed link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkAccount {
    pub parent: u64,
    pub child: u64,
    /// Users at or below the child node.
    pub users_below: usize,
    pub bits: u64,
    pub messages: usize,
}

/// Which messages reach which node.
#[derive(Debug, Clone)]
pub struct Routing {
    received: Vec<Vec<usize>>,
    links: Vec<LinkAccount>,
    file_bits: usize,
}

impl Routing {
    pub fn links(&self) -> &[LinkAccount] {
        &self.links
    }

    pub fn link_to(&self, child: u64) -> Option<&LinkAccount> {
        self.links.iter().find(|l| l.child == child)
    }

    /// Normalized rate over the link into `child`.
    pub fn link_rate(&self, child: u64) -> Option<f64> {
        self.link_to(child)
            .map(|l| l.bits as f64 / self.file_bits as f64)
    }

    /// Indices of transcript messages arriving at user `k`'s leaf.
    pub fn delivered_to(&self, tree: &TreeNetwork, k: usize) -> &[usize] {
        &self.received[tree.leaf_of_user[k]]
    }
}

/// Routes with the standard usefulness rule at every router.
pub fn route_transcript(
    tree: &TreeNetwork,
    transcript: &Transcript,
    demands: &DemandVector,
) -> Result<Routing> {
    route_with(tree, transcript, demands, |_| ForwardRule::Useful)
}

/// Routes with a per-router rule chosen by node id.
pub fn route_with(
    tree: &TreeNetwork,
    transcript: &Transcript,
    demands: &DemandVector,
    rule: impl Fn(u64) -> ForwardRule,
) -> Result<Routing> {
    demands.check_len(tree.num_users())?;
    let count = tree.ids.len();
    let rules: Vec<ForwardRule> = tree.ids.iter().map(|&id| rule(id)).collect();
    let mut received = vec![Vec::new(); count];
    let mut bits = vec![0u64; count];
    let mut stack = Vec::new();

    for (idx, message) in transcript.messages.iter().enumerate() {
        let targets = message_targets(&message.kind, demands);
        let len = message.payload.len() as u64;
        received[tree.root].push(idx);
        stack.push(tree.root);
        while let Some(u) = stack.pop() {
            for &v in &tree.children[u] {
                if rules[u].forwards(targets, tree.below[v]) {
                    received[v].push(idx);
                    bits[v] += len;
                    stack.push(v);
                }
            }
        }
    }

    let links = (0..count)
        .filter_map(|i| {
            tree.parent[i].map(|p| LinkAccount {
                parent: tree.ids[p],
                child: tree.ids[i],
                users_below: tree.below[i].len(),
                bits: bits[i],
                messages: received[i].len(),
            })
        })
        .collect();
    Ok(Routing {
        received,
        links,
        file_bits: transcript.file_bits,
    })
}

/// Decodes every user from only the messages routed to its leaf.
pub fn verify_tree_decode(
    tree: &TreeNetwork,
    routing: &Routing,
    caches: &CacheContents,
    files: &FileStore,
    transcript: &Transcript,
    demands: &DemandVector,
) -> Result<VerifyReport> {
    let decoder = Decoder::for_demands(caches, demands)?;
    let users = (0..tree.num_users())
        .map(|k| {
            let local = LocalCache::new(k, caches, files);
            let messages = routing
                .delivered_to(tree, k)
                .iter()
                .map(|&i| &transcript.messages[i]);
            match decoder.decode_messages(k, &local, messages) {
                Ok(out) => UserOutcome {
                    user: k,
                    decoded: &out[0] == files.file(demands.file_of(k)),
                    error: None,
                },
                Err(e) => UserOutcome {
                    user: k,
                    decoded: false,
                    error: Some(e),
                },
            }
        })
        .collect();
    Ok(VerifyReport { users })
}
