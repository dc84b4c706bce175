"""Server configuration parsing.

The config is a free-form token stream: KEY VALUE pairs separated by
arbitrary whitespace, with double-quoted values for the group name and
the user-visible directory, and an inline device list whose declared
count must match the number of path tokens that follow it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, DeviceCountMismatch, MissingKey, UnknownKey

__all__ = ["VipfsConfig", "parse_config", "serialize_config"]

_KEYS = ("MAX_APP", "MAX_SRV_FILE", "DATA_BUFLEN", "SRV_GROUP_NAME", "SRVR_DEVICE_LIST", "VIP_DIR")
_INT_KEYS = {"MAX_APP", "MAX_SRV_FILE", "DATA_BUFLEN"}


@dataclass(frozen=True)
class VipfsConfig:
    max_app: int
    max_srv_file: int
    data_buflen: int
    srv_group_name: str
    device_paths: tuple[str, ...]
    vip_dir: str

    def __post_init__(self):
        object.__setattr__(self, "device_paths", tuple(self.device_paths))


@dataclass(frozen=True)
class _Token:
    text: str
    ordinal: int  # 1-based position in the stream
    quoted: bool


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    ordinal = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        ordinal += 1
        if c == '"':
            end = text.find('"', i + 1)
            if end < 0:
                raise ConfigError(f"unterminated quote at token {ordinal}")
            tokens.append(_Token(text[i + 1 : end], ordinal, True))
            i = end + 1
        else:
            j = i
            while j < n and not text[j].isspace():
                j += 1
            tokens.append(_Token(text[i:j], ordinal, False))
            i = j
    return tokens


def _positive_int(tok: _Token, key: str) -> int:
    if not tok.text.isdigit():
        raise ConfigError(f"{key} expects a positive integer, got {tok.text!r} (token {tok.ordinal})")
    value = int(tok.text)
    if value < 1:
        raise ConfigError(f"{key} must be >= 1, got {value} (token {tok.ordinal})")
    return value


def parse_config(text: str) -> VipfsConfig:
    """Parse configuration text; all six keys are required.

    A token in key position that is not a known key is rejected: paths
    there point at a device-list count shorter than the paths supplied,
    anything else is an unknown key.
    """
    tokens = _tokenize(text)
    values: dict[str, object] = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.quoted or tok.text not in _KEYS:
            if "/" in tok.text:
                raise DeviceCountMismatch(tok.text, tok.ordinal, "device path outside the declared SRVR_DEVICE_LIST count")
            raise UnknownKey(tok.text, tok.ordinal)
        key = tok.text
        if key in values:
            raise ConfigError(f"duplicate key {key} (token {tok.ordinal})")
        if i + 1 >= len(tokens):
            raise ConfigError(f"{key} is missing its value (token {tok.ordinal})")
        i += 1
        if key in _INT_KEYS:
            values[key] = _positive_int(tokens[i], key)
            i += 1
        elif key in ("SRV_GROUP_NAME", "VIP_DIR"):
            values[key] = tokens[i].text
            i += 1
        else:  # SRVR_DEVICE_LIST
            declared = tokens[i]
            if not declared.text.isdigit():
                raise ConfigError(f"SRVR_DEVICE_LIST expects a count, got {declared.text!r} (token {declared.ordinal})")
            count = int(declared.text)
            i += 1
            paths = []
            for _ in range(count):
                if i >= len(tokens):
                    raise DeviceCountMismatch(declared.text, declared.ordinal, f"SRVR_DEVICE_LIST declares {count} devices but the list ends early")
                path_tok = tokens[i]
                if not path_tok.quoted and path_tok.text in _KEYS:
                    raise DeviceCountMismatch(path_tok.text, path_tok.ordinal, f"SRVR_DEVICE_LIST declares {count} devices but fewer paths follow")
                paths.append(path_tok.text)
                i += 1
            values[key] = tuple(paths)
    for key in _KEYS:
        if key not in values:
            raise MissingKey(key)
    return VipfsConfig(
        max_app=values["MAX_APP"],
        max_srv_file=values["MAX_SRV_FILE"],
        data_buflen=values["DATA_BUFLEN"],
        srv_group_name=values["SRV_GROUP_NAME"],
        device_paths=values["SRVR_DEVICE_LIST"],
        vip_dir=values["VIP_DIR"],
    )


def serialize_config(cfg: VipfsConfig) -> str:
    """Canonical token order; parse_config(serialize_config(c)) == c."""
    lines = [
        f"MAX_APP {cfg.max_app} MAX_SRV_FILE {cfg.max_srv_file} DATA_BUFLEN {cfg.data_buflen}",
        f'SRV_GROUP_NAME "{cfg.srv_group_name}" SRVR_DEVICE_LIST {len(cfg.device_paths)}',
        *cfg.device_paths,
        f'VIP_DIR "{cfg.vip_dir}"',
    ]
    return "\n".join(lines) + "\n"
