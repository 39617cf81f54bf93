"""Range-gated wireless channel: OFDM frame airtime, carrier sense and
reception resolution with hidden-terminal collisions.

Propagation is a hard disc of radius ``max_range`` (closed boundary): inside
it reception is perfect unless another in-range transmission overlaps, outside
it a transmitter contributes nothing, which is exactly what makes hidden
terminals collide at the receiver without being heard by each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import engine
from .engine import PHY_TX_END

SPEED_OF_LIGHT_M_S = 299_792_458.0

# 802.11a OFDM timing: 16 us preamble + 4 us PLCP header, then 4 us symbols.
PLCP_OVERHEAD_NS = 20_000
SYMBOL_NS = 4_000
SERVICE_AND_TAIL_BITS = 16 + 6

# Frame kinds.
BEACON = "BEACON"
RTS = "RTS"
CTS = "CTS"
DATA = "DATA"
ACK = "ACK"

BROADCAST = -1


class Outcome(Enum):
    DELIVERED = "Delivered"
    COLLISION = "CollisionLoss"
    OUT_OF_RANGE = "OutOfRange"


def frame_airtime_ns(mpdu_bytes: int, data_rate_bps: float = 12e6) -> int:
    """Airtime of an MPDU: PLCP preamble/header plus 4 us data symbols.

    At the fixed 12 Mbps rate a symbol carries 48 bits, so the symbol count is
    ceil((16 + 8*mpdu + 6) / 48).
    """
    if mpdu_bytes < 0:
        raise ValueError("mpdu_bytes must be >= 0")
    bits_per_symbol = data_rate_bps * (SYMBOL_NS * 1e-9)
    symbols = math.ceil((SERVICE_AND_TAIL_BITS + 8 * mpdu_bytes) / bits_per_symbol)
    return PLCP_OVERHEAD_NS + SYMBOL_NS * symbols


def frame_airtime(mpdu_bytes: int, data_rate_bps: float = 12e6) -> float:
    return frame_airtime_ns(mpdu_bytes, data_rate_bps) / engine.NS_PER_S


def distance(a, b) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def in_range(a, b, max_range: float) -> bool:
    """True iff the 3-D Euclidean distance is <= max_range (closed boundary)."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return dx * dx + dy * dy + dz * dz <= max_range * max_range


def propagation_ns(dist_m: float) -> int:
    return round(dist_m / SPEED_OF_LIGHT_M_S * engine.NS_PER_S)


@dataclass(slots=True)
class Frame:
    """One over-the-air unit.  ``duration_ns`` is the NAV reservation carried
    by RTS/CTS/DATA; ``payload`` is the application packet behind a DATA frame."""

    kind: str
    src: int
    dst: int
    mpdu_bytes: int
    duration_ns: int = 0
    flow_id: int | None = None
    seq: int | None = None
    enqueue_ns: int | None = None
    payload: object | None = None


@dataclass(slots=True)
class Transmission:
    frame: Frame
    tx_node: int
    tx_pos: tuple[float, float, float]
    start_ns: int
    end_ns: int
    listeners: list[int] = field(default_factory=list)
    corrupted_at: set[int] = field(default_factory=set)


def resolve_reception(
    tx: Transmission,
    receiver_pos_start,
    receiver_pos_end,
    others: list[Transmission],
    max_range: float,
) -> Outcome:
    """Classify one transmission at one receiver.

    OutOfRange if the transmitter is beyond max_range at either the start or
    the end of the frame (the receiver may be the moving UAV); CollisionLoss
    if any other transmission whose transmitter is in range of the receiver
    overlaps [start, end); Delivered otherwise.  There is no capture effect.
    """
    if not in_range(tx.tx_pos, receiver_pos_start, max_range):
        return Outcome.OUT_OF_RANGE
    if not in_range(tx.tx_pos, receiver_pos_end, max_range):
        return Outcome.OUT_OF_RANGE
    for other in others:
        if other is tx:
            continue
        if other.start_ns < tx.end_ns and other.end_ns > tx.start_ns:
            if in_range(other.tx_pos, receiver_pos_end, max_range):
                return Outcome.COLLISION
    return Outcome.DELIVERED


class Channel:
    """Event-driven medium shared by one AP (node 0) and n fixed stations.

    Busy/idle edges and corruption marks are fanned out to in-range listeners
    directly at frame start/end; per-listener propagation delay (sub-us at
    these ranges) is applied to delivery timestamps and to everything the
    receiver schedules from them, not to carrier-sense edges.
    """

    def __init__(self, sim, max_range: float, data_rate_bps: float, positions, ap_position):
        # positions: node id -> static (x, y, z) for stations (ids 1..n);
        # ap_position: callable t_ns -> (x, y, z) for the mobile AP (id 0).
        self.sim = sim
        self.max_range = max_range
        self.data_rate_bps = data_rate_bps
        self._sta_pos = positions
        self._ap_pos = ap_position
        self.macs: list = []  # index = node id, set by the simulation wiring
        self._active: dict[int, list[Transmission]] = {}
        # Static station->station neighbour sets never change.
        self._neighbours: dict[int, list[int]] = {}
        r2 = max_range * max_range
        ids = sorted(positions)
        for a in ids:
            ax, ay, az = positions[a]
            near = []
            for b in ids:
                if b == a:
                    continue
                bx, by, bz = positions[b]
                if (ax - bx) ** 2 + (ay - by) ** 2 + (az - bz) ** 2 <= r2:
                    near.append(b)
            self._neighbours[a] = near
        for node in [0] + ids:
            self._active[node] = []
        # Per-run reception accounting at the addressed receiver.
        self.outcome_counts: dict[tuple[str, Outcome], int] = {}
        self.collision_events = 0
        self.data_collisions = 0

    def node_position(self, node: int, t_ns: int):
        if node == 0:
            return self._ap_pos(t_ns)
        return self._sta_pos[node]

    def is_busy(self, node: int) -> bool:
        return bool(self._active[node]) or self.macs[node].own_tx

    def _listeners_of(self, src: int, tx_pos, now_ns: int) -> list[int]:
        if src == 0:
            r2 = self.max_range * self.max_range
            out = []
            for node, (x, y, z) in self._sta_pos.items():
                if (x - tx_pos[0]) ** 2 + (y - tx_pos[1]) ** 2 + (z - tx_pos[2]) ** 2 <= r2:
                    out.append(node)
            out.sort()
            return out
        listeners = list(self._neighbours[src])
        ap = self._ap_pos(now_ns)
        if in_range(tx_pos, ap, self.max_range):
            listeners.insert(0, 0)
        return listeners

    def transmit(self, frame: Frame, now_ns: int) -> Transmission:
        src = frame.src
        tx_pos = self.node_position(src, now_ns)
        end_ns = now_ns + frame_airtime_ns(frame.mpdu_bytes, self.data_rate_bps)
        tx = Transmission(frame, src, tx_pos, now_ns, end_ns)
        tx.listeners = self._listeners_of(src, tx_pos, now_ns)
        macs = self.macs
        # The transmitter corrupts anything it was still receiving.
        for ongoing in self._active[src]:
            ongoing.corrupted_at.add(src)
        for node in tx.listeners:
            active = self._active[node]
            if active or macs[node].own_tx:
                tx.corrupted_at.add(node)
                for ongoing in active:
                    ongoing.corrupted_at.add(node)
            active.append(tx)
            if len(active) == 1 and not macs[node].own_tx:
                macs[node].on_medium_busy(now_ns)
        macs[src].on_own_tx_start(now_ns)
        detail = ""
        if self.sim.tracing:
            detail = f"{frame.kind} src={src} dst={frame.dst} bytes={frame.mpdu_bytes}"
        self.sim.schedule_ns(end_ns, PHY_TX_END, src, lambda: self._on_tx_end(tx), detail)
        return tx

    def _record_outcome(self, frame: Frame, outcome: Outcome) -> None:
        key = (frame.kind, outcome)
        self.outcome_counts[key] = self.outcome_counts.get(key, 0) + 1
        if outcome is Outcome.COLLISION:
            self.collision_events += 1
            if frame.kind == DATA:
                self.data_collisions += 1

    def _on_tx_end(self, tx: Transmission) -> None:
        now_ns = tx.end_ns
        frame = tx.frame
        macs = self.macs
        macs[tx.tx_node].on_own_tx_end(now_ns)
        dst_seen = False
        for node in tx.listeners:
            active = self._active[node]
            active.remove(tx)
            rx_pos = self.node_position(node, now_ns)
            if node == 0 and not in_range(tx.tx_pos, rx_pos, self.max_range):
                # The UAV left coverage while the frame was in the air.
                outcome = Outcome.OUT_OF_RANGE
            elif node in tx.corrupted_at:
                outcome = Outcome.COLLISION
            else:
                outcome = Outcome.DELIVERED
            if node == frame.dst:
                dst_seen = True
                self._record_outcome(frame, outcome)
            if outcome is not Outcome.OUT_OF_RANGE:
                arrival_ns = now_ns + propagation_ns(distance(tx.tx_pos, rx_pos))
                macs[node].on_frame(arrival_ns, frame, outcome)
            if not active and not macs[node].own_tx:
                macs[node].on_medium_idle(now_ns)
        if frame.dst != BROADCAST and not dst_seen:
            self._record_outcome(frame, Outcome.OUT_OF_RANGE)
