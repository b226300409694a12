"""Conflict-free two-bank memory scheduling, ROM images, BRAM accounting.

Memory model.  Coefficients live in two simple dual-port banks (one read
port + one write port each).  A word holds t adjacent coefficients in
fixed-width slots; each operand polynomial occupies a region of
d = 256/(2t) rows per bank.  Operand a sits in region 0 with bank A
holding words 0..d-1 in order and bank B holding words d..2d-1 in
REVERSE order (row r keeps word 2d-1-r); operand b mirrors that across
the banks in region 1.  The mirrored split is what lets every butterfly
stage read its two partner words from different banks in the same cycle.

Transform scheduling.  Word-level stages pair words (x, x+p) for spans
p = d, d/2, ..., 1, one stage per layer.  Within a span-p row group the
schedule alternates a mirror pattern — rows (u, p-1-u) then (p-1-u, u) —
which keeps both the current reads and the in-flight writes of the
previous stage on opposite banks.  Results are written back to the very
two locations a cycle read (arriving pipeline_depth cycles later), with
per-cycle routing flags choosing which output lands in which bank so
that the next stage again finds partners mirrored.  The first stage
additionally emits the second half of its cycles in reversed order;
that single amendment is what makes the whole program hazard-free for
every pipeline depth up to exactly d/2 (and no further).  Layers too
fine to pair whole words (span below one word) run as in-place
single-row sweeps; the pointwise stage reads operand words of a and b
pairwise from opposite banks.

The generator tracks bank occupancy explicitly and derives every flag
from the tracked layout, asserting the pairing invariants as it goes.
The inverse schedule is the forward one replayed backwards with the
read/write roles of the flags exchanged, so a transform followed by its
inverse leaves the memory exactly in the starting arrangement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .core_arith import N, SCHEMES, ModulusParams, from_mont
from .ntt_reference import basemul_zetas, forward_zetas, inverse_zetas

CH_NTT = 0
CH_INTT = 1

BANK_A = 0
BANK_B = 1

# One physical 18Kb block-RAM primitive is modeled as two independent
# 9Kb halves: a memory needs enough halves to cover its width (36-bit
# max data width per 18Kb unit) and its total bit volume.
_BRAM_BITS = 18432
_BRAM_MAX_WIDTH = 36


@dataclass(frozen=True)
class MemoryGeometry:
    """Shape of one scheme's view of the coefficient banks."""

    scheme: str
    t: int                 # butterfly lanes = coefficients per word
    word_width: int        # bits per memory word
    d: int                 # rows per operand region (two regions per bank)

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.t < 1 or self.t & (self.t - 1):
            raise ValueError("lane count must be a power of two")
        if self.d != N // (2 * self.t):
            raise ValueError("region depth must equal 256/(2t)")
        expect = self.t * SCHEMES[self.scheme].slot_bits
        if self.word_width != expect:
            raise ValueError(f"word width {self.word_width} != {expect}")

    @classmethod
    def for_scheme(cls, scheme: str, t: int) -> "MemoryGeometry":
        p = SCHEMES[scheme]
        return cls(scheme=scheme, t=t, word_width=t * p.slot_bits,
                   d=N // (2 * t))

    @property
    def slot_bits(self) -> int:
        return SCHEMES[self.scheme].slot_bits


@dataclass(frozen=True)
class CycleEntry:
    """One scheduled cycle: two row addresses plus routing flags.

    addr_a / addr_b are region-relative rows for banks A and B.
    read_swap = 1 means bank A currently holds the HIGH partner word;
    write_swap = 1 means the low output is routed to bank B.  tw_index
    is the logical twiddle index consumed by this cycle's butterflies.
    """

    addr_a: int
    addr_b: int
    read_swap: int
    write_swap: int
    tw_index: int


@dataclass(frozen=True)
class StageSchedule:
    kind: str              # "mirror" (word pairing), "intra" (in-word), "pwm"
    span: int              # word distance p, or in-word length, or 0 for pwm
    entries: tuple[CycleEntry, ...]


@dataclass(frozen=True)
class AddressSchedule:
    ch: int                # 0 = forward, 1 = inverse
    d: int
    stages: tuple[StageSchedule, ...]
    initial_layout: tuple[tuple[int, ...], tuple[int, ...]]
    final_layout: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def cycles(self) -> int:
        return sum(len(s.entries) for s in self.stages)


def initial_layout(d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Word occupancy at load time: A[r] = word r, B[r] = word 2d-1-r."""
    return tuple(range(d)), tuple(2 * d - 1 - r for r in range(d))


def transformed_layout(d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Occupancy after a forward pass: A[r] = word 2r, B[r] = word 2r+1."""
    return tuple(2 * r for r in range(d)), tuple(2 * r + 1 for r in range(d))


def _forward_stages(d: int, stage1_reversal: bool):
    """Tracked-layout generation of the forward word-level schedule."""
    la = list(range(d))
    lb = [2 * d - 1 - r for r in range(d)]
    stages = []
    p = d
    first = True
    while p >= 1:
        entries = []
        for g in range(d // p):
            base = g * p
            if p == 1:
                wa, wb = la[base], lb[base]
                low, high = (wa, wb) if wa % 2 == 0 else (wb, wa)
                assert high == low + 1
                entries.append(CycleEntry(base, base, int(wa == high), 0,
                                          d + low // 2))
                la[base], lb[base] = low, high  # low word settles in bank A
                continue
            for u in range(p // 2):
                for ra, rb in ((base + u, base + p - 1 - u),
                               (base + p - 1 - u, base + u)):
                    wa, wb = la[ra], lb[rb]
                    low, high = (wa, wb) if wa % (2 * p) < p else (wb, wa)
                    assert high == low + p and low % (2 * p) < p
                    assert low // (2 * p) == g, "row group != twiddle group"
                    # The low output must land in the child stage's low
                    # half of this row group, whichever bank that row is.
                    low_to_a = (ra - base) < p // 2
                    if low_to_a:
                        la[ra], lb[rb] = low, high
                    else:
                        la[ra], lb[rb] = high, low
                    entries.append(CycleEntry(ra, rb, int(wa == high),
                                              int(not low_to_a),
                                              d // p + g))
        if first and stage1_reversal:
            entries = entries[: d // 2] + entries[d // 2:][::-1]
        stages.append(StageSchedule("mirror", p, tuple(entries)))
        first = False
        p //= 2
    assert la == [2 * r for r in range(d)]
    assert lb == [2 * r + 1 for r in range(d)]
    return tuple(stages)


def generate_addresses(ch: int, d: int,
                       stage1_reversal: bool = True) -> AddressSchedule:
    """Build the full word-level schedule for a forward (ch=0) or inverse
    (ch=1) transform over 2d words.

    The forward schedule emits log2(2d) stages of d cycles; stage 1's
    second half is emitted in reverse (disable via stage1_reversal to
    reproduce the hazard it prevents).  The inverse schedule is the
    forward one replayed stage-by-stage backwards with read/write flag
    roles exchanged; it starts from the transformed layout and restores
    the load-time layout, so no extra permutation pass exists anywhere.
    """
    if d < 2 or d & (d - 1):
        raise ValueError("region depth must be a power of two >= 2")
    if ch not in (CH_NTT, CH_INTT):
        raise ValueError("ch selects 0 (forward) or 1 (inverse)")
    if ch == CH_NTT:
        return AddressSchedule(ch, d, _forward_stages(d, stage1_reversal),
                               initial_layout(d), transformed_layout(d))
    stages = []
    for st in reversed(_forward_stages(d, stage1_reversal=False)):
        entries = tuple(
            CycleEntry(e.addr_a, e.addr_b, read_swap=e.write_swap,
                       write_swap=e.read_swap, tw_index=e.tw_index)
            for e in st.entries
        )
        stages.append(StageSchedule(st.kind, st.span, entries))
    return AddressSchedule(ch, d, tuple(stages),
                           transformed_layout(d), initial_layout(d))


def intra_word_stages(p: ModulusParams, t: int, d: int,
                      inverse: bool = False) -> tuple[StageSchedule, ...]:
    """Stages for layers narrower than a word: one in-place row sweep each.

    Row j holds words (2j, 2j+1) after the word-level stages; a length-L
    layer uses t/L consecutive twiddle indices per row starting at
    128/L + t*j/L (stored per cycle as the base).  Forward order is
    descending L; the inverse runs them first, ascending.
    """
    ells = []
    ell = t // 2
    while ell >= p.min_len:
        ells.append(ell)
        ell //= 2
    if inverse:
        ells.reverse()
    stages = []
    for ell in ells:
        entries = tuple(
            CycleEntry(j, j, 0, 0, 128 // ell + t * j // ell)
            for j in range(d)
        )
        stages.append(StageSchedule("intra", ell, entries))
    return tuple(stages)


def pwm_schedule(p: ModulusParams, t: int, d: int) -> StageSchedule:
    """Pointwise-stage addressing: operand words a_w and b_w pairwise.

    The stage runs on the post-transform layout (even words in bank A
    at row w/2, odd words in bank B), and operand b was loaded with the
    banks mirrored, so word w of a and word w of b always sit in
    opposite banks at the same region-relative row: one cycle reads
    both.  Kyber spends two cycles per word (product stage then combine
    stage, 4d total) and uses psi indices from t/2 * w; Dilithium one
    cycle per word (2d total).
    """
    entries = []
    for w in range(2 * d):
        row = w // 2
        a_in_b = w & 1
        tw = (t // 2) * w if p.scheme == "kyber" else 0
        e = CycleEntry(row, row, a_in_b, a_in_b, tw)
        entries.append(e)
        if p.scheme == "kyber":
            entries.append(e)  # second cycle: combine + write-back
    return StageSchedule("pwm", 0, tuple(entries))


# ---------------------------------------------------------------------------
# Coefficient packing.
# ---------------------------------------------------------------------------

def pack_word(coeffs, slot_bits: int) -> int:
    word = 0
    for s, c in enumerate(coeffs):
        assert 0 <= c < (1 << slot_bits)
        word |= c << (s * slot_bits)
    return word


def unpack_word(word: int, t: int, slot_bits: int) -> list[int]:
    mask = (1 << slot_bits) - 1
    return [(word >> (s * slot_bits)) & mask for s in range(t)]


def pack_coefficients(coeffs, geom: MemoryGeometry) -> tuple[list[int], list[int]]:
    """Split 256 coefficients into the two banks' region-0 rows.

    Word w covers coefficients [t*w, t*w + t).  Bank A row r gets word r;
    bank B row r gets word 2d-1-r (the reverse packing that makes stage-1
    partners (x, x+d) meet at mirrored rows).
    """
    if len(coeffs) != N:
        raise ValueError(f"expected {N} coefficients")
    t, d, sb = geom.t, geom.d, geom.slot_bits
    words = [pack_word(coeffs[t * w: t * w + t], sb) for w in range(2 * d)]
    return words[:d], words[d:][::-1]


def unpack_coefficients(bank_a, bank_b, geom: MemoryGeometry,
                        layout=None) -> list[int]:
    """Inverse of pack_coefficients under a given bank occupancy map."""
    t, d, sb = geom.t, geom.d, geom.slot_bits
    la, lb = layout if layout is not None else initial_layout(d)
    out = [0] * N
    for r in range(d):
        for bank, lay in ((bank_a, la), (bank_b, lb)):
            w = lay[r]
            out[t * w: t * w + t] = unpack_word(bank[r], t, sb)
    return out


# ---------------------------------------------------------------------------
# Twiddle ROM.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwiddleRom:
    """Logical twiddle store: forward, pre-halved inverse, and psi regions.

    Values are Montgomery-scaled.  Region offsets index the flat value
    vector; word packing for a concrete image is applied at emission.
    """

    scheme: str
    values: tuple[int, ...]
    forward_offset: int
    inverse_offset: int
    psi_offset: int        # == len(values) when the scheme has no psi region

    def forward(self, k: int) -> int:
        return self.values[self.forward_offset + k]

    def inverse(self, k: int) -> int:
        return self.values[self.inverse_offset + k]

    def psi(self, i: int) -> int:
        return self.values[self.psi_offset + i]


@lru_cache(maxsize=None)
def build_twiddle_rom(scheme: str) -> TwiddleRom:
    p = SCHEMES[scheme]
    fwd = forward_zetas(p)
    inv = inverse_zetas(p)
    psi = basemul_zetas(p)
    assert from_mont(fwd[0], p) == 1
    values = fwd + inv + psi
    return TwiddleRom(scheme=scheme, values=values, forward_offset=0,
                      inverse_offset=len(fwd),
                      psi_offset=len(fwd) + len(inv))


# ---------------------------------------------------------------------------
# Conflict checking.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hazard:
    cycle: int
    bank: int
    row: int
    lands_at: int          # when the pending write would have completed


@dataclass(frozen=True)
class ConflictReport:
    pipeline_depth: int
    d: int
    depth_within_bound: bool     # pipeline_depth <= d/2
    hazards: tuple[Hazard, ...]

    @property
    def clean(self) -> bool:
        return not self.hazards


def check_conflict_free(s: AddressSchedule, pipeline_depth: int,
                        d: int) -> ConflictReport:
    """Replay the schedule with latency-delayed write-back.

    A cycle's reads happen immediately; its writes to the same two
    locations land pipeline_depth cycles later.  Reading a location
    whose write is still in flight is a hazard.  Stages run back to
    back with no gaps — that is the whole point of the schedule.
    """
    lands: dict[tuple[int, int], int] = {}
    hazards = []
    c = 0
    for stage in s.stages:
        for e in stage.entries:
            for loc in ((BANK_A, e.addr_a), (BANK_B, e.addr_b)):
                t_land = lands.get(loc, -1)
                if t_land > c:
                    hazards.append(Hazard(c, loc[0], loc[1], t_land))
                lands[loc] = c + pipeline_depth
            c += 1
    return ConflictReport(pipeline_depth, d, pipeline_depth <= d // 2,
                          tuple(hazards))


def enumerate_stage_pairs(s: AddressSchedule):
    """Word-index partner pairs per stage, tracking occupancy — the
    oracle view used to prove schedule completeness against a reference
    transform trace."""
    la, lb = (list(x) for x in s.initial_layout)
    out = []
    for stage in s.stages:
        pairs = []
        writes = {}
        for e in stage.entries:
            wa, wb = la[e.addr_a], lb[e.addr_b]
            low, high = (wb, wa) if e.read_swap else (wa, wb)
            pairs.append((low, high))
            if e.write_swap:
                writes[(BANK_A, e.addr_a)] = high
                writes[(BANK_B, e.addr_b)] = low
            else:
                writes[(BANK_A, e.addr_a)] = low
                writes[(BANK_B, e.addr_b)] = high
        for (bank, row), w in writes.items():
            (la if bank == BANK_A else lb)[row] = w
        out.append(pairs)
    assert (tuple(la), tuple(lb)) == s.final_layout
    return out


# ---------------------------------------------------------------------------
# Core configurations and BRAM accounting.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignGeometry:
    """One shipped core configuration's memory plan."""

    name: str
    kyber_t: int | None
    dilithium_t: int | None
    pipeline_depth: int
    shared_banks: bool     # one bank pair serving both schemes

    def geometry(self, scheme: str) -> MemoryGeometry:
        t = self.kyber_t if scheme == "kyber" else self.dilithium_t
        if t is None:
            raise ValueError(f"{self.name} does not support {scheme}")
        return MemoryGeometry.for_scheme(scheme, t)

    @property
    def schemes(self) -> tuple[str, ...]:
        out = []
        if self.kyber_t is not None:
            out.append("kyber")
        if self.dilithium_t is not None:
            out.append("dilithium")
        return tuple(out)

    @property
    def bank_width(self) -> int:
        return max(self.geometry(s).word_width for s in self.schemes)

    @property
    def bank_rows(self) -> int:
        return max(2 * self.geometry(s).d for s in self.schemes)

    @property
    def max_pipeline_depth(self) -> int:
        return min(self.geometry(s).d for s in self.schemes) // 2


DESIGNS: dict[str, DesignGeometry] = {
    "standalone-kyber": DesignGeometry("standalone-kyber", 2, None, 11, False),
    "standalone-dilithium": DesignGeometry("standalone-dilithium", None, 1, 15, False),
    "d1": DesignGeometry("d1", 2, 1, 15, False),
    "d2": DesignGeometry("d2", 4, 2, 15, True),
    "d3": DesignGeometry("d3", 8, 4, 8, True),
}


def _twiddle_value_count(scheme: str) -> int:
    # forward + pre-halved inverse (+ psi for the pair scheme)
    return 384 if scheme == "kyber" else 512


def _twiddle_words(dg: DesignGeometry, scheme: str, width: int) -> int:
    per_word = width // SCHEMES[scheme].coeff_bits
    return math.ceil(_twiddle_value_count(scheme) / per_word)


def _addr_entries(dg: DesignGeometry, scheme: str) -> int:
    p = SCHEMES[scheme]
    d = dg.geometry(scheme).d
    per_dir = p.layers * d
    pwm = (4 if scheme == "kyber" else 2) * d
    return 2 * per_dir + pwm


@dataclass(frozen=True)
class BramMemory:
    label: str
    depth: int
    width: int
    halves: int

    @property
    def units(self) -> float:
        return self.halves / 2


@dataclass(frozen=True)
class BramEstimate:
    design: str
    memories: tuple[BramMemory, ...]

    @property
    def total_units(self) -> float:
        return sum(m.units for m in self.memories)


def _mem(label: str, depth: int, width: int) -> BramMemory:
    halves = max(math.ceil(width / _BRAM_MAX_WIDTH),
                 math.ceil(width * depth / _BRAM_BITS))
    return BramMemory(label, depth, width, halves)


def estimate_bram_usage(design: str) -> BramEstimate:
    """18Kb-unit cost of a design's banks and ROMs, half-unit granularity.

    Separate-bank designs use region-relative address words of
    2*log2(d)+2 bits (two row fields plus the two routing flags) and a
    counter-driven twiddle ROM.  Shared-bank designs widen the address
    word to 2*log2(rows)+2 plus an explicit twiddle-index field, since
    one merged program serves both schemes' region layouts.
    """
    dg = DESIGNS[design]
    mems: list[BramMemory] = []
    if dg.shared_banks:
        rows, width = dg.bank_rows, dg.bank_width
        mems.append(_mem("bank A", rows, width))
        mems.append(_mem("bank B", rows, width))
        tw_words = sum(_twiddle_words(dg, s, width) for s in dg.schemes)
        mems.append(_mem("twiddle rom", tw_words, width))
        entries = sum(_addr_entries(dg, s) for s in dg.schemes)
        ew = 2 * int(math.log2(rows)) + 2 + math.ceil(math.log2(tw_words))
        mems.append(_mem("address rom", entries, ew))
    else:
        for s in dg.schemes:
            g = dg.geometry(s)
            rows, width = 2 * g.d, g.word_width
            mems.append(_mem(f"{s} bank A", rows, width))
            mems.append(_mem(f"{s} bank B", rows, width))
            mems.append(_mem(f"{s} twiddle rom",
                             _twiddle_words(dg, s, width), width))
            ew = 2 * int(math.log2(g.d)) + 2
            mems.append(_mem(f"{s} address rom", _addr_entries(dg, s), ew))
    return BramEstimate(design, tuple(mems))


# ---------------------------------------------------------------------------
# ROM image emission.
# ---------------------------------------------------------------------------

def rom_image_lines(words, width: int) -> list[str]:
    """Hex lines, one word per line, most-significant nibble first."""
    digits = math.ceil(width / 4)
    lines = []
    for w in words:
        assert 0 <= w < (1 << width)
        lines.append(f"{w:0{digits}x}")
    return lines


def _full_program(p: ModulusParams, t: int, d: int):
    """All cycle entries of one scheme: forward, inverse, pointwise."""
    fwd = generate_addresses(CH_NTT, d)
    inv = generate_addresses(CH_INTT, d)
    entries = []
    for st in list(fwd.stages) + list(intra_word_stages(p, t, d)):
        entries.extend(st.entries)
    for st in list(intra_word_stages(p, t, d, inverse=True)) + list(inv.stages):
        entries.extend(st.entries)
    entries.extend(pwm_schedule(p, t, d).entries)
    return entries


def build_rom_images(design: str) -> dict:
    """Pack a design's twiddle and address ROMs into emission-ready words.

    Returns {"twiddle": (lines, width), "addr": (lines, width),
    "manifest": {key: value}}.  The twiddle image concatenates each
    scheme's forward/inverse(/psi) value runs, several values per word
    where the word width allows; the address image packs one cycle entry
    per word as addr_A | addr_B | read_swap | write_swap (| twiddle
    index on shared-bank designs), most significant field first.
    """
    dg = DESIGNS[design]
    width = dg.bank_width
    manifest: dict[str, object] = {
        "design": design,
        "schemes": ",".join(dg.schemes),
        "bank_rows": dg.bank_rows,
        "bank_width": width,
        "format": "hex, one word per line, most-significant nibble first",
    }

    tw_words: list[int] = []
    for s in dg.schemes:
        p = SCHEMES[s]
        rom = build_twiddle_rom(s)
        per_word = width // p.coeff_bits
        manifest[f"{s}_twiddle_offset"] = len(tw_words)
        manifest[f"{s}_twiddle_values_per_word"] = per_word
        for base in range(0, len(rom.values), per_word):
            chunk = rom.values[base: base + per_word]
            w = 0
            for i, v in enumerate(chunk):
                w |= v << (i * p.coeff_bits)
            tw_words.append(w)
    manifest["twiddle_words"] = len(tw_words)

    addr_words: list[int] = []
    if dg.shared_banks:
        row_bits = int(math.log2(dg.bank_rows))
        tw_bits = math.ceil(math.log2(len(tw_words)))
    else:
        row_bits = None
        tw_bits = 0
    addr_width = 0
    for s in dg.schemes:
        p = SCHEMES[s]
        g = dg.geometry(s)
        rb = row_bits if row_bits is not None else int(math.log2(g.d))
        ew = 2 * rb + 2 + tw_bits
        addr_width = max(addr_width, ew)
        manifest[f"{s}_addr_offset"] = len(addr_words)
        manifest[f"{s}_d"] = g.d
        manifest[f"{s}_t"] = g.t
        for e in _full_program(p, g.t, g.d):
            w = e.addr_a
            w = (w << rb) | e.addr_b
            w = (w << 1) | e.read_swap
            w = (w << 1) | e.write_swap
            if tw_bits:
                w = (w << tw_bits) | e.tw_index
            addr_words.append(w)
    manifest["addr_words"] = len(addr_words)
    manifest["addr_width"] = addr_width

    return {
        "twiddle": (rom_image_lines(tw_words, width), width),
        "addr": (rom_image_lines(addr_words, addr_width), addr_width),
        "manifest": manifest,
    }
