# moirank/engagement.py
"""
Engagement Metrics
LCRT indicator, Ratio of Affection per post and Magnitude of Influence per account.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Sequence, Tuple, Union

from .errors import NoPostsError, ZeroFollowersError

_LOG = logging.getLogger("moirank.engagement")

AccountId = str


class EngagementMode(str, Enum):
    """
    How ROA counts engagement.

    strict: distinct engaging users over followers (bounded by 1 on clean data)
    raw: per-type interaction counts x 100 over followers (percentage scale)
    """

    STRICT = "strict"
    RAW = "raw"


ModeLike = Union[EngagementMode, str]


@dataclass(frozen=True)
class AccountProfile:
    """A tracked account and its declared follower count."""
    id: AccountId
    handle: str
    category: str
    follower_count: int

    def __post_init__(self):
        if self.follower_count < 0:
            raise ValueError(f"follower_count must be >= 0 for '{self.id}'")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class Post:
    """
    One post and the users who engaged with it.

    likers, mentioners and retweeters are stored as frozensets; the author may
    not appear in any of them.
    """
    post_id: str
    author: AccountId
    likers: FrozenSet[AccountId] = field(default_factory=frozenset)
    mentioners: FrozenSet[AccountId] = field(default_factory=frozenset)
    retweeters: FrozenSet[AccountId] = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ("likers", "mentioners", "retweeters"):
            members = frozenset(getattr(self, name))
            if self.author in members:
                raise ValueError(f"Post '{self.post_id}': author '{self.author}' appears in {name}")
            object.__setattr__(self, name, members)

    @property
    def engagers(self) -> FrozenSet[AccountId]:
        return self.likers | self.mentioners | self.retweeters

    @property
    def interaction_count(self) -> int:
        return len(self.likers) + len(self.mentioners) + len(self.retweeters)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "post_id": self.post_id,
            "author": self.author,
            "likers": sorted(self.likers),
            "mentioners": sorted(self.mentioners),
            "retweeters": sorted(self.retweeters),
        }


@dataclass(frozen=True)
class MoiResult:
    """Magnitude of Influence of one account with the per-post ROA it is built from."""
    account: AccountId
    moi: float
    roa_per_post: Tuple[Tuple[str, float], ...]
    post_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "account": self.account,
            "moi": self.moi,
            "roa_per_post": [[post_id, value] for post_id, value in self.roa_per_post],
            "post_count": self.post_count,
        }


def lcrt(user: AccountId, post: Post) -> int:
    """1 if user liked, mentioned or retweeted the post, else 0."""
    return 1 if (user in post.likers or user in post.mentioners or user in post.retweeters) else 0


def roa(post: Post, profile: AccountProfile, mode: ModeLike = EngagementMode.STRICT) -> float:
    """
    Ratio of Affection of one post.

    Args:
        post: Post authored by profile
        profile: Author profile
        mode: strict or raw counting

    Returns:
        Engagement ratio (strict) or percentage-scaled rate (raw)

    Raises:
        ZeroFollowersError: If the author declares no followers
        ValueError: If post and profile disagree on the author
    """
    mode = EngagementMode(mode)
    if post.author != profile.id:
        raise ValueError(f"Post '{post.post_id}' is authored by '{post.author}', not '{profile.id}'")
    if profile.follower_count == 0:
        raise ZeroFollowersError(profile.id)

    if mode is EngagementMode.RAW:
        return post.interaction_count * 100 / profile.follower_count

    distinct = len(post.engagers)
    if distinct > profile.follower_count:
        _LOG.warning(
            "DataQualityWarning: post '%s' has %d distinct engagers but '%s' declares %d followers",
            post.post_id, distinct, profile.id, profile.follower_count,
        )
    return distinct / profile.follower_count


def moi(
    profile: AccountProfile,
    posts: Sequence[Post],
    mode: ModeLike = EngagementMode.STRICT,
) -> MoiResult:
    """
    Magnitude of Influence: root mean square of ROA over the account's posts.

    Squares are summed in ascending post_id order so the result does not
    depend on the order posts are given in.

    Raises:
        NoPostsError: If posts is empty
        ZeroFollowersError: Propagated from roa
        ValueError: If a post belongs to another account or post ids repeat
    """
    if not posts:
        raise NoPostsError(profile.id)

    ordered = sorted(posts, key=lambda p: p.post_id)
    ids = [p.post_id for p in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError(f"Duplicate post ids for account '{profile.id}'")

    per_post = tuple((p.post_id, roa(p, profile, mode)) for p in ordered)

    total = 0.0
    for _, value in per_post:
        total += value * value
    value = math.sqrt(total / len(per_post))

    return MoiResult(account=profile.id, moi=value, roa_per_post=per_post, post_count=len(per_post))