"""Minimal encoder-decoder transformer with learnable positions."""

from __future__ import annotations

import torch
from torch import nn

from fftrainer.config import TrainConfig

MAX_LEN = 64


class Seq2Seq(nn.Module):
    def __init__(self, config: TrainConfig, vocab_size: int):
        super().__init__()
        d = config.d_model
        self.embed = nn.Embedding(vocab_size, d, padding_idx=0)
        self.pos = nn.Embedding(MAX_LEN, d)
        self.transformer = nn.Transformer(
            d_model=d,
            nhead=config.heads,
            num_encoder_layers=config.layers,
            num_decoder_layers=config.layers,
            dim_feedforward=config.ff_width,
            dropout=0.0,
            batch_first=True,
        )
        self.out = nn.Linear(d, vocab_size)

    def _embed(self, tokens: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(tokens.size(1), device=tokens.device)
        return self.embed(tokens) + self.pos(positions)

    def forward(self, src: torch.Tensor, tgt: torch.Tensor) -> torch.Tensor:
        """Logits over the vocabulary for each target position."""
        causal = nn.Transformer.generate_square_subsequent_mask(
            tgt.size(1), device=tgt.device
        )
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt),
            tgt_mask=causal,
            src_key_padding_mask=src == 0,
            tgt_key_padding_mask=tgt == 0,
            memory_key_padding_mask=src == 0,
        )
        return self.out(hidden)

    @torch.no_grad()
    def greedy_decode(self, src: torch.Tensor, max_len: int) -> list[list[int]]:
        """Greedy decoding; rows are index sequences without bos/eos."""
        self.eval()
        batch = src.size(0)
        memory = self.transformer.encoder(
            self._embed(src), src_key_padding_mask=src == 0
        )
        tgt = torch.ones(batch, 1, dtype=torch.long, device=src.device)  # bos = 1
        finished = torch.zeros(batch, dtype=torch.bool, device=src.device)
        for _ in range(max_len):
            causal = nn.Transformer.generate_square_subsequent_mask(
                tgt.size(1), device=tgt.device
            )
            hidden = self.transformer.decoder(
                self._embed(tgt),
                memory,
                tgt_mask=causal,
                memory_key_padding_mask=src == 0,
            )
            step = self.out(hidden[:, -1]).argmax(dim=-1)
            step = torch.where(finished, torch.zeros_like(step), step)
            tgt = torch.cat([tgt, step.unsqueeze(1)], dim=1)
            finished |= step == 2  # eos
            if bool(finished.all()):
                break
        rows = []
        for row in tgt[:, 1:].tolist():
            out = []
            for idx in row:
                if idx == 2:
                    break
                if idx != 0:
                    out.append(idx)
            rows.append(out)
        return rows
