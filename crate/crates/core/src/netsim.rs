//! Deterministic simulation of the distributed well-founded computation.
//!
//! Peers are actors that only see their own rules and the fragments other peers send
//! back. A single logical clock drives delivery: inboxes are FIFO and are served in
//! ascending peer id order, one message per tick.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{self, Write};

use serde::Serialize;

use crate::engine::{Body, Rule};
use crate::ground::{ground_program_lenient, normalize_with_fresh};
use crate::interp::Interpretation;
use crate::syntax::{GroundAtom, P2PSystem, Peer, PeerId, PredKey};
use crate::totalrw::{normalize_program, rew_t_peer, three_valued, NormalizationScheme, ThreeValuedModel, Truth};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MessageKind {
    QueryRequest,
    QueryAnswer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub from: PeerId,
    pub to: PeerId,
    pub request_id: u64,
    pub predicate: PredKey,
    /// Answers only: the requested predicate's true and undefined atoms.
    pub payload: Option<ThreeValuedModel>,
    pub visited: BTreeSet<PeerId>,
}

/// One delivered message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub t: u64,
    pub kind: MessageKind,
    pub from: u32,
    pub to: u32,
    pub request_id: u64,
    pub predicate: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimTrace {
    pub events: Vec<TraceEvent>,
}

impl SimTrace {
    pub fn requests(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(|e| e.kind == MessageKind::QueryRequest)
    }
    pub fn answers(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(|e| e.kind == MessageKind::QueryAnswer)
    }

    /// One JSON object per line.
    pub fn write_jsonl(&self, mut w: impl Write) -> io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

/// Result of a simulated query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    /// Local well-founded model of the queried peer.
    pub fragment: ThreeValuedModel,
    /// Status of the query atom when it is ground.
    pub status: Option<Truth>,
    pub trace: SimTrace,
}

#[derive(Debug)]
enum NodeState {
    Idle,
    Waiting { missing: BTreeSet<PredKey> },
    Done(ThreeValuedModel),
}

/// An actor: its own peer, an inbox and the fragments received so far.
#[derive(Debug)]
pub struct PeerNode {
    pub peer: Peer,
    pub inbox: VecDeque<Message>,
    pub cache: BTreeMap<PredKey, ThreeValuedModel>,
    state: NodeState,
    /// Requests to answer once the local model is known: (requester, request id, predicate).
    waiters: Vec<(PeerId, u64, PredKey)>,
}

fn restrict(m: &ThreeValuedModel, key: &PredKey) -> ThreeValuedModel {
    let keep = |a: &GroundAtom| a.key() == *key;
    ThreeValuedModel { true_set: m.true_set.filter(keep), undefined: m.undefined.filter(keep), false_set: m.false_set.filter(keep) }
}

/// Remote predicates read by the peer's mapping rules.
fn remote_predicates(peer: &Peer) -> BTreeSet<PredKey> {
    peer.mapping_rules.iter().flat_map(|r| r.positive_atoms().map(|a| a.key())).filter(|k| k.peer != peer.id).collect()
}

/// Well-founded model of one peer's rewriting given three-valued remote inputs.
pub fn local_well_founded(peer: &Peer, remote: &BTreeMap<PredKey, ThreeValuedModel>) -> Result<ThreeValuedModel, Error> {
    if peer.mapping_rules.iter().any(|r| r.mapping_kind() == Some(crate::syntax::MappingKind::Min)) {
        return Err(Error::Scope("the distributed computation requires maximal mapping rules".into()));
    }
    if peer.standard_rules.iter().any(|r| r.has_negation()) {
        return Err(Error::Scope("the distributed computation requires negation-free standard rules".into()));
    }
    let (norm, fresh) = normalize_with_fresh(&P2PSystem::with_peers([peer.clone()]))?;
    let mut prog = rew_t_peer(&norm.peers[&peer.id]);
    for frag in remote.values() {
        for a in &frag.true_set {
            prog.push(Rule::fact(a.to_atom()));
        }
        for a in &frag.undefined {
            prog.push(Rule::normal(a.to_atom(), Body::new(vec![], vec![a.to_atom()], vec![])));
        }
    }
    let ground = ground_program_lenient(&normalize_program(&prog, NormalizationScheme::Shift));
    let normal = ground.to_normal().expect("normalized rewriting has single-atom heads");
    let own = peer.id;
    Ok(three_valued(&normal, |a| a.peer == own && !fresh.contains(&a.key())).model)
}

impl PeerNode {
    pub fn new(peer: Peer) -> Self {
        PeerNode {
            peer,
            inbox: VecDeque::new(),
            cache: BTreeMap::new(),
            state: NodeState::Idle,
            waiters: Vec::new(),
        }
    }

    fn model(&self) -> Option<&ThreeValuedModel> {
        match &self.state {
            NodeState::Done(m) => Some(m),
            _ => None,
        }
    }

    /// Starts the local computation, returning outgoing requests.
    fn start(&mut self, visited: &BTreeSet<PeerId>, next_id: &mut u64) -> Result<Vec<Message>, Error> {
        if !matches!(self.state, NodeState::Idle) {
            return Ok(Vec::new());
        }
        let mut chain = visited.clone();
        chain.insert(self.peer.id);
        let needed = remote_predicates(&self.peer);
        let mut out = Vec::new();
        for key in &needed {
            if chain.contains(&key.peer) {
                let path: Vec<String> = chain.iter().map(|p| p.0.to_string()).collect();
                return Err(Error::CyclicTopology(format!("peer {} is reached again from peers {{{}}}", key.peer, path.join(", "))));
            }
            *next_id += 1;
            out.push(Message {
                kind: MessageKind::QueryRequest,
                from: self.peer.id,
                to: key.peer,
                request_id: *next_id,
                predicate: key.clone(),
                payload: None,
                visited: chain.clone(),
            });
        }
        self.state = NodeState::Waiting { missing: needed };
        self.finish_if_ready()?;
        Ok(out)
    }

    fn finish_if_ready(&mut self) -> Result<(), Error> {
        if let NodeState::Waiting { missing } = &self.state {
            if missing.is_empty() {
                self.state = NodeState::Done(local_well_founded(&self.peer, &self.cache)?);
            }
        }
        Ok(())
    }

    fn flush_answers(&mut self) -> Vec<Message> {
        let Some(m) = self.model().cloned() else { return Vec::new() };
        std::mem::take(&mut self.waiters)
            .into_iter()
            .map(|(to, request_id, predicate)| Message {
                kind: MessageKind::QueryAnswer,
                from: self.peer.id,
                to,
                request_id,
                payload: Some(restrict(&m, &predicate)),
                predicate,
                visited: BTreeSet::new(),
            })
            .collect()
    }

    /// Handles one delivered message; returns the messages it sends.
    pub fn handle(&mut self, msg: Message, next_id: &mut u64) -> Result<Vec<Message>, Error> {
        let mut out = Vec::new();
        match msg.kind {
            MessageKind::QueryRequest => {
                if msg.visited.contains(&self.peer.id) {
                    return Err(Error::CyclicTopology(format!("request {} returned to peer {}", msg.request_id, self.peer.id)));
                }
                self.waiters.push((msg.from, msg.request_id, msg.predicate));
                out.extend(self.start(&msg.visited, next_id)?);
            }
            MessageKind::QueryAnswer => {
                let frag = msg.payload.unwrap_or_default();
                self.cache.insert(msg.predicate.clone(), frag);
                if let NodeState::Waiting { missing } = &mut self.state {
                    missing.remove(&msg.predicate);
                }
                self.finish_if_ready()?;
            }
        }
        out.extend(self.flush_answers());
        Ok(out)
    }
}

/// The network: nodes keyed by peer id and the logical clock.
pub struct Network {
    pub nodes: BTreeMap<PeerId, PeerNode>,
    clock: u64,
    next_id: u64,
    trace: SimTrace,
}

impl Network {
    pub fn new(sys: &P2PSystem) -> Self {
        Network {
            nodes: sys.peers.values().map(|p| (p.id, PeerNode::new(p.clone()))).collect(),
            clock: 0,
            next_id: 0,
            trace: SimTrace::default(),
        }
    }

    fn post(&mut self, msgs: Vec<Message>) -> Result<(), Error> {
        for m in msgs {
            let node = self.nodes.get_mut(&m.to).ok_or_else(|| Error::Scope(format!("message to unknown peer {}", m.to)))?;
            node.inbox.push_back(m);
        }
        Ok(())
    }

    /// Delivers one message; false when every inbox is empty.
    fn step(&mut self) -> Result<bool, Error> {
        let Some(id) = self.nodes.iter().find(|(_, n)| !n.inbox.is_empty()).map(|(id, _)| *id) else {
            return Ok(false);
        };
        let node = self.nodes.get_mut(&id).expect("node exists");
        let msg = node.inbox.pop_front().expect("non-empty inbox");
        self.clock += 1;
        self.trace.events.push(TraceEvent {
            t: self.clock,
            kind: msg.kind,
            from: msg.from.0,
            to: msg.to.0,
            request_id: msg.request_id,
            predicate: msg.predicate.to_string(),
        });
        let out = node.handle(msg, &mut self.next_id)?;
        self.post(out)?;
        Ok(true)
    }

    /// Runs a local query at `peer` to completion.
    pub fn query(&mut self, peer: PeerId) -> Result<ThreeValuedModel, Error> {
        let node = self.nodes.get_mut(&peer).ok_or_else(|| Error::Scope(format!("unknown peer {peer}")))?;
        let out = node.start(&BTreeSet::new(), &mut self.next_id)?;
        self.post(out)?;
        while self.step()? {}
        let node = &self.nodes[&peer];
        node.model().cloned().ok_or_else(|| Error::CyclicTopology(format!("peer {peer} never received all answers")))
    }

    pub fn trace(&self) -> &SimTrace {
        &self.trace
    }
}

/// Simulates a user query at the query atom's peer.
pub fn simulate_query(sys: &P2PSystem, query: &crate::syntax::PeerAtom) -> Result<SimResult, Error> {
    if !sys.is_maximal() || sys.lp_has_negation() {
        return Err(Error::Scope("the distributed computation requires a maximal system with negation-free standard rules".into()));
    }
    let mut net = Network::new(sys);
    let fragment = net.query(query.peer)?;
    let status = query.to_ground().map(|g| fragment.status(&g));
    Ok(SimResult { fragment, status, trace: net.trace.clone() })
}

/// The centralized well-founded model restricted to one peer.
pub fn centralized_fragment(sys: &P2PSystem, peer: PeerId) -> Result<ThreeValuedModel, Error> {
    Ok(crate::totalrw::well_founded(sys)?.restrict_to_peer(peer))
}

/// True and undefined atoms agree; false is the complement in both.
pub fn agrees(a: &ThreeValuedModel, b: &ThreeValuedModel) -> bool {
    a.true_set == b.true_set && a.undefined == b.undefined
}

/// Atoms of a fragment known true or undefined.
pub fn known(m: &ThreeValuedModel) -> Interpretation {
    m.true_set.union(&m.undefined)
}
