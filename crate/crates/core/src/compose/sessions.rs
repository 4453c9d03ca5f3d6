use super::{compatible, gateway, ComposeError};
use crate::names::Participant;
use crate::session::Session;
use crate::store::Store;

/// Disjoint participants, `h` bound in `m`, `k` bound in `m2`, and the two
/// interface processes compatible.
pub fn compatible_sessions(store: &Store, m: &Session, h: &Participant, m2: &Session, k: &Participant) -> bool {
    if !m.participants().is_disjoint(&m2.participants()) {
        return false;
    }
    match (m.get(h), m2.get(k)) {
        (Some(a), Some(b)) => compatible(store, a, b),
        _ => false,
    }
}

/// Replaces `h` and `k` by gateways towards each other and puts the two
/// sessions side by side.
pub fn connect_sessions(
    store: &mut Store,
    m: &Session,
    h: &Participant,
    m2: &Session,
    k: &Participant,
) -> Result<Session, ComposeError> {
    if !compatible_sessions(store, m, h, m2, k) {
        return Err(ComposeError::IncompatibleSessions { h: h.clone(), k: k.clone() });
    }
    let gh = gateway(store, m.get(h).unwrap(), k)?;
    let gk = gateway(store, m2.get(k).unwrap(), h)?;
    let bindings = m
        .without(h)
        .iter()
        .chain(m2.without(k).iter())
        .map(|(p, q)| (p.clone(), q))
        .chain([(h.clone(), gh), (k.clone(), gk)])
        .collect::<Vec<_>>();
    Ok(Session::new(store, bindings).expect("participants are disjoint"))
}
