"""Hardware database: chips, preset nodes, cost model, memory-derived model sizes.

Node throughput is measured in H100-equivalents: one equivalent is 990 TFLOP/s
of dense 16-bit compute, one sixteenth of a 15,840 TFLOP/s reference node.
Cluster cost applies a chip-to-server factor of 1.64 and a server-to-cluster
factor of 1.23 on top of per-chip prices.
"""

from __future__ import annotations

import csv
import difflib
import enum
import os
from dataclasses import dataclass
from importlib import resources

from .errors import InfeasibleConfigError, UnknownPresetError, UnpricedNodeError

H100_EQUIVALENT_TFLOPS = 990.0
CHIP_TO_SERVER = 1.64
SERVER_TO_CLUSTER = 1.23

# Training-state footprint per parameter (weights + optimizer state + buffers),
# back-fitted so a 1,280 GB FP8 node holds ~91B params and a 4,000 GB 16-bit
# node holds 250B.
BYTES_PER_PARAM = {"fp8": 14.0, "fp16": 16.0}

CATALOG_PATH_ENV = "DTSIM_CATALOG"


class Precision(enum.Enum):
    """Training arithmetic width. BF16 and FP16 are interchangeable here."""

    FP16 = "fp16"
    FP8 = "fp8"

    @classmethod
    def parse(cls, text: str) -> "Precision":
        t = text.strip().lower()
        if t in ("fp16", "bf16", "16", "16-bit"):
            return cls.FP16
        if t in ("fp8", "8", "8-bit"):
            return cls.FP8
        raise ValueError(f"unknown precision {text!r} (expected fp16, bf16, or fp8)")


@dataclass(frozen=True)
class ChipSpec:
    """A single accelerator chip."""

    name: str
    flops16: float  # dense 16-bit throughput, TFLOP/s
    hbm: float  # accelerator memory, GB
    flops8: float | None = None  # dense 8-bit throughput, TFLOP/s
    price: float | None = None  # USD per chip

    def __post_init__(self):
        if self.flops16 <= 0:
            raise ValueError(f"chip {self.name}: flops16 must be positive")
        if self.hbm <= 0:
            raise ValueError(f"chip {self.name}: hbm must be positive")
        if self.price is not None and self.price <= 0:
            raise ValueError(f"chip {self.name}: price must be positive")
        if self.flops8 is not None and self.flops8 < self.flops16:
            raise ValueError(f"chip {self.name}: flops8 must be >= flops16")


@dataclass(frozen=True)
class NodeSpec:
    """A self-contained node: one chip type times a chip count."""

    name: str
    chip: ChipSpec
    chips_per_node: int

    def __post_init__(self):
        if self.chips_per_node < 1:
            raise ValueError(f"node {self.name}: chips_per_node must be >= 1")

    def node_flops(self, precision: Precision) -> float:
        """Aggregate node throughput in FLOP/s at the given precision."""
        if precision is Precision.FP8:
            if self.chip.flops8 is None:
                raise InfeasibleConfigError(
                    "precision",
                    f"node {self.name!r} ({self.chip.name}) has no 8-bit support",
                )
            return self.chips_per_node * self.chip.flops8 * 1e12
        return self.chips_per_node * self.chip.flops16 * 1e12

    @property
    def node_hbm(self) -> float:
        """Total accelerator memory, GB."""
        return self.chips_per_node * self.chip.hbm

    @property
    def h100_equivalents(self) -> float:
        """Compute capacity relative to one H100, always at dense 16-bit."""
        return self.chips_per_node * self.chip.flops16 / H100_EQUIVALENT_TFLOPS

    @property
    def node_price(self) -> float:
        """Chips-only node price in USD, before server/cluster markups."""
        if self.chip.price is None:
            raise UnpricedNodeError(self.name)
        return self.chips_per_node * self.chip.price

    @property
    def supports_fp8(self) -> bool:
        return self.chip.flops8 is not None


def h100_equivalents(node: NodeSpec) -> float:
    return node.h100_equivalents


def cluster_cost(node: NodeSpec, n_nodes: int) -> float:
    """Upfront hardware cost in USD for n_nodes nodes, with both markups."""
    if n_nodes < 0:
        raise ValueError("n_nodes must be >= 0")
    if n_nodes == 0:
        return 0.0
    return node.node_price * n_nodes * CHIP_TO_SERVER * SERVER_TO_CLUSTER


def max_model_params(
    memory_gb: float, precision: Precision, bytes_per_param: float | None = None
) -> float:
    """Largest trainable dense model, in parameters, that fits in memory_gb."""
    if memory_gb <= 0:
        raise ValueError("memory_gb must be positive")
    bpp = bytes_per_param if bytes_per_param is not None else BYTES_PER_PARAM[precision.value]
    return memory_gb * 1e9 / bpp


class Catalog:
    """Preset node database. Immutable after load; register() adds new entries."""

    def __init__(self, nodes: dict[str, NodeSpec]):
        self._nodes = dict(nodes)

    @classmethod
    def load(cls, path: str | None = None) -> "Catalog":
        """Load from a CSV file; defaults to the shipped catalog.

        Columns: name, chips, flops16_tflops, flops8_tflops (optional),
        hbm_gb, price_usd (optional). Performance and memory figures are
        per chip.
        """
        if path is None:
            path = os.environ.get(CATALOG_PATH_ENV)
        if path is None:
            ref = resources.files("dtsim").joinpath("data/catalog.csv")
            with ref.open("r", encoding="utf-8") as fh:
                return cls._from_csv(fh)
        with open(path, "r", encoding="utf-8") as fh:
            return cls._from_csv(fh)

    @classmethod
    def _from_csv(cls, fh) -> "Catalog":
        nodes: dict[str, NodeSpec] = {}
        for row in csv.DictReader(fh):
            name = row["name"].strip()
            chip = ChipSpec(
                name=name,
                flops16=float(row["flops16_tflops"]),
                flops8=float(row["flops8_tflops"]) if row.get("flops8_tflops") else None,
                hbm=float(row["hbm_gb"]),
                price=float(row["price_usd"]) if row.get("price_usd") else None,
            )
            nodes[name] = NodeSpec(name=name, chip=chip, chips_per_node=int(row["chips"]))
        return cls(nodes)

    def lookup(self, name: str) -> NodeSpec:
        try:
            return self._nodes[name]
        except KeyError:
            close = difflib.get_close_matches(name, self._nodes, n=1, cutoff=0.4)
            raise UnknownPresetError(name, close[0] if close else None) from None

    def register(self, node: NodeSpec) -> None:
        if node.name in self._nodes:
            raise ValueError(f"preset {node.name!r} already registered")
        self._nodes[node.name] = node

    def names(self) -> list[str]:
        return list(self._nodes)

    def priced(self) -> list[NodeSpec]:
        """Presets that carry a per-chip price (costable in the optimizer)."""
        return [n for n in self._nodes.values() if n.chip.price is not None]

    def __iter__(self):
        return iter(self._nodes.values())

    def __len__(self) -> int:
        return len(self._nodes)


def lookup_preset(name: str, catalog: Catalog | None = None) -> NodeSpec:
    return (catalog or default_catalog()).lookup(name)


_DEFAULT: Catalog | None = None


def default_catalog() -> Catalog:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Catalog.load()
    return _DEFAULT
