from __future__ import annotations

from pathlib import Path

import pytest

from pdflow.rulepack import default_pack

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pack():
    return default_pack()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def scan_fixture(name: str, **kwargs):
    from pdflow.scanner import scan

    pack_ = kwargs.pop("pack", None) or default_pack()
    return scan([FIXTURES / name], pack_, **kwargs)


TABLE3_INSTANCES = [
    "_ -retrieve-> full_name",
    "user_detail+_ ~check~> isFemale",
    "UserInfo(_) -get-> first_name",
    "name ~match~> choice",
    "UserInfo -retrieve-> choice",
    "AccountInfo+userId -update-> AccountInfo",
    "AccountInfo+_ -update-> AccountInfo",
    "SSN -print-> print(SSN)",
]

TABLE4_ROWS = [
    # (source, sink, sink type, instance)
    ("users.email_addr", "createQueryBuilder", "DB", "users.email_addr -createQueryBuilder-> query"),
    ("users.email", "createQueryBuilder", "DB", "users.email -createQueryBuilder-> query"),
    ("email", "this.usersRepository.findOne", "DB", "email+_ -findOne-> UserInfo"),
    ("email_addr", "this.usersService.create", "C/D", "email_addr+_ -create-> UserInfo"),
    ("email", "UserInfo.findOrCreateByEmail", "C/D", "UserInfo+email -findOrCreateByEmail-> UserInfo"),
    ("email", "user.organizationUsers.sendData", "T", "email -sendData-> sendData(email)"),
    ("email_addr", "UserInfo.update", "M", "UserInfo+email_addr -update-> UserInfo"),
]
