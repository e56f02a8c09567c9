"""Content-addressed model persistence.

Each model lives in its own directory named by a digest of its weights
and configuration, so identical training runs map to the same id and
nothing is ever overwritten with different content.
"""

from __future__ import annotations

import hashlib
import io
import json
from pathlib import Path

import torch

from .model import ModelConfig, PairClassifier


class ModelStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _weights_bytes(self, model: PairClassifier) -> bytes:
        buf = io.BytesIO()
        torch.save(model.state_dict(), buf)
        return buf.getvalue()

    def save(self, model: PairClassifier) -> str:
        weights = self._weights_bytes(model)
        config = json.dumps(model.config.to_dict(), sort_keys=True).encode("utf-8")
        model_id = hashlib.sha256(weights + config).hexdigest()[:16]
        directory = self.root / model_id
        if not directory.exists():
            directory.mkdir()
            (directory / "weights.pt").write_bytes(weights)
            (directory / "config.json").write_bytes(config)
        return model_id

    def load(self, model_id: str) -> PairClassifier:
        directory = self.root / model_id
        if not directory.is_dir():
            raise KeyError(f"no such model: {model_id}")
        config = ModelConfig.from_dict(json.loads((directory / "config.json").read_text()))
        model = PairClassifier(config)
        state = torch.load(directory / "weights.pt", map_location="cpu", weights_only=True)
        model.load_state_dict(state)
        model.eval()
        return model

    def ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())

    def __contains__(self, model_id: str) -> bool:
        return (self.root / model_id).is_dir()
