use std::fmt;

use super::error::NetError;
use super::NodeId;

/// Maximum rendered length of a sensor address.
pub const MAX_ADDRESS_LEN: usize = 1024;

/// Where a signal came from: the channel path, e.g. `skin/left-hand/thermo-3`.
///
/// Two signals with identical payloads are still distinct when their
/// addresses differ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SensorAddress(Vec<String>);

impl SensorAddress {
    pub fn new<I, S>(segments: I) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(NetError::InvalidAddress("empty address".into()));
        }
        for seg in &segments {
            if seg.is_empty() {
                return Err(NetError::InvalidAddress("empty segment".into()));
            }
            if seg.chars().any(|c| c == '/' || c.is_whitespace()) {
                return Err(NetError::InvalidAddress(format!(
                    "segment {seg:?} contains '/' or whitespace"
                )));
            }
        }
        let addr = SensorAddress(segments);
        let rendered = addr.to_string().chars().count();
        if rendered > MAX_ADDRESS_LEN {
            return Err(NetError::InvalidAddress(format!(
                "address is {rendered} characters long (limit {MAX_ADDRESS_LEN})"
            )));
        }
        Ok(addr)
    }

    /// Parses the `/`-joined rendering.
    pub fn parse(text: &str) -> Result<Self, NetError> {
        Self::new(text.split('/'))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for SensorAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("/"))
    }
}

/// A two-part sensory input: the origin channel and the opaque signal shape,
/// stamped with the engine tick at which it was captured.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SensorSignal {
    pub origin: SensorAddress,
    pub payload: Vec<u8>,
    pub captured_at: u64,
}

impl SensorSignal {
    pub fn new(origin: SensorAddress, payload: impl Into<Vec<u8>>, captured_at: u64) -> Self {
        SensorSignal {
            origin,
            payload: payload.into(),
            captured_at,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Number,
    Text,
    Truth,
    Ref,
    Signal,
    Unset,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Number => "num",
            ValueKind::Text => "text",
            ValueKind::Truth => "bool",
            ValueKind::Ref => "ref",
            ValueKind::Signal => "signal",
            ValueKind::Unset => "unset",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A dynamically tagged property value.
///
/// Numbers compare with IEEE equality, except that NaN equals NaN so that
/// stored states stay comparable.
#[derive(Debug, Clone)]
pub enum Value {
    Number(f64),
    Text(String),
    Truth(bool),
    Ref(NodeId),
    Signal(SensorSignal),
    /// Present but unknown.
    Unset,
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Number(_) => ValueKind::Number,
            Value::Text(_) => ValueKind::Text,
            Value::Truth(_) => ValueKind::Truth,
            Value::Ref(_) => ValueKind::Ref,
            Value::Signal(_) => ValueKind::Signal,
            Value::Unset => ValueKind::Unset,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_unset(&self) -> bool {
        matches!(self, Value::Unset)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a == b || (a.is_nan() && b.is_nan()),
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Truth(a), Value::Truth(b)) => a == b,
            (Value::Ref(a), Value::Ref(b)) => a == b,
            (Value::Signal(a), Value::Signal(b)) => a == b,
            (Value::Unset, Value::Unset) => true,
            _ => false,
        }
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Number(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Truth(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<NodeId> for Value {
    fn from(id: NodeId) -> Self {
        Value::Ref(id)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
            Value::Truth(b) => write!(f, "{b}"),
            Value::Ref(id) => write!(f, "#{id}"),
            Value::Signal(sig) => {
                let hex = if sig.payload.is_empty() {
                    "-".to_string()
                } else {
                    hex::encode(&sig.payload)
                };
                write!(f, "signal({} {} @{})", sig.origin, hex, sig.captured_at)
            }
            Value::Unset => f.write_str("unset"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_rules() {
        assert!(SensorAddress::new(Vec::<String>::new()).is_err());
        assert!(SensorAddress::new(["skin", ""]).is_err());
        assert!(SensorAddress::new(["a b"]).is_err());
        let a = SensorAddress::parse("skin/left-hand/thermo-3").unwrap();
        assert_eq!(a.segments().len(), 3);
        assert_eq!(a.to_string(), "skin/left-hand/thermo-3");
        let long = "x".repeat(MAX_ADDRESS_LEN + 1);
        assert!(SensorAddress::new([long]).is_err());
        let exact = "x".repeat(MAX_ADDRESS_LEN);
        assert!(SensorAddress::new([exact]).is_ok());
    }

    #[test]
    fn same_shape_different_nerve() {
        let p7 = SensorAddress::parse("skin/p7").unwrap();
        let p8 = SensorAddress::parse("skin/p8").unwrap();
        let a = SensorSignal::new(p7.clone(), b"HOT".to_vec(), 1);
        let b = SensorSignal::new(p8, b"HOT".to_vec(), 1);
        assert_ne!(a, b);
        assert_eq!(a, SensorSignal::new(p7, b"HOT".to_vec(), 1));
    }

    #[test]
    fn cross_kind_values_differ() {
        assert_ne!(Value::Number(1.0), Value::Text("1".into()));
        assert_ne!(Value::Truth(true), Value::Number(1.0));
        assert_eq!(Value::Number(f64::NAN), Value::Number(f64::NAN));
        assert_eq!(Value::Number(0.0), Value::Number(-0.0));
    }
}
