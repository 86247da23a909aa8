"""Prompt templates for the high-level planner and the perception queries.

Placeholders look like ``{goal}`` and are filled with :func:`fill`, which
uses plain string replacement because some templates contain literal braces.
"""
from __future__ import annotations

ROBOT_ICON = "\u25b2"  # ▲
DOOR_ICON = "\u2589"  # ▉
SIGN_ICON = "\u25c6"  # ◆
PERSON_ICON = "\u25cf"  # ●
FRONTIER_ICON = "\u2605"  # ★

ICONS = {
    "robot_icon": ROBOT_ICON,
    "door_icon": DOOR_ICON,
    "sign_icon": SIGN_ICON,
    "person_icon": PERSON_ICON,
    "frontier_icon": FRONTIER_ICON,
}

SYSTEM = """\
You are ChatGPT, a large language model trained by OpenAI.
Follow the user's instructions carefully.
Respond concisely, informatively, and helpfully.
If you're unsure about an answer, say so.
You have strong reasoning capabilities.
"""

CHOOSE_LANDMARK = """\
You are a robot ({robot_icon}) trying to find {target}.

The map depicts the environment you've explored so far with doors ({door_icon}), signs ({sign_icon}), people ({person_icon}), and frontiers ({frontier_icon}). The map is North up, and the borders are labeled with cardinal directions N, S, E, W.

The JSON provided below maps each landmark index on the map to its name and, if applicable, directions (from signs) and info (from people).

Choose the next landmark to go to based on the provided map and JSON.

Reason over how to most **efficiently** find the target, like going to directions signs to narrow down regions, following ascending/descending door number patterns, visiting nearest doors to see their room number, asking a person nearby for directions, or exploring frontiers to find more landmarks.

Visited doors are named in the format "Visited_a door_X", where X is the room number. Use these room numbers to identify door numbering patterns.

Follow patterns efficiently. For example, in ascending patterns, if you are at door 100 and looking for door 110, skip doors 101, 102, etc.

Keep in mind that all information from signs, people, etc. are relative to the position of that particular landmark, and is probably only applicable in a local region of that landmark.

If an unvisited person is nearby and you want to ask for more information on where to go, choose the person.
Information provided by a visited person will be listed in 'info' using cardinal directions. Use this information.

Example:

    Input: target='Room 3339', info="I should go North to find the door"

    Output: You will pick a landmark to the north of the image.

If directions are available in the json, follow those directions. This will take precedence over looking for things nearby. Make sure your range is correct.

Example:

    Input: target='Room 3339', directions={'North':['Room 3326-3340'], 'North-East':[], 'East':[], 'South-East':[], 'South':['Room 3101-3307'], 'South-West':[], 'West':[], 'North-West':[]}

    Output: You will pick a landmark to the north of the image because 3339 is in the range 3326-3340.

**Do not choose landmarks that are already visited (i.e. names that look like "Visited_obj_id"**.

First, think carefully step by step about where the target room might be and decide which landmark to visit next.  Then, print out your reasoning followed by the chosen landmark index in brackets.

Example: I am looking for Room 110. The directions from the sign say room 100-120 are south. Landmark 3 is an unvisited door to the south, so it might be the target; Chosen landmark: [3]

JSON:

{vlm_keypt_dict}
"""

READ_DOOR = """\
What is the door number in the image? Return only the number and confidence score (to 2 decimal places), separated by a semicolon.

If you can't see a sign or you can only read half of the sign, return -1; confidence score.

If you can see the sign but you can't read the numbers, return -2; confidence score.

Your confidence score should be between 0 and 1. Be more conservative with your estimates.
"""

READ_SIGN = """\
Break down the directions sign you see in the image.

Return your answer in the form {'left': [content], 'right': [content], 'forward': [content], 'backwards': [content]}. Return only the dict (no comments or formatting).
"""

INTERACTION_TYPE = """\
You are a delivery robot the current goal: {goal}.

Given the information you have learned: {learned_info},
what do you want to ask the person in front of you?

Pick the response that makes the most sense from the following 3 choices.

Return the number and only the number.

1. "How can I help you?" (This is used to get a goal, only use if the current goal is None)

2. "Do you know where {goal} is?" (This is used to ask for directions)

3. "Do you know which room # {goal} is in?" (This is used to get directory information)
"""

RECORD_NOTE = """\
You are a robot ({robot_icon}) trying to find {goal}. You are facing {robot_facing}. Given the map and the directions by Person, write a short note for your future self to refer to later on how to reach your goal.

Return only the output in the format "Note: note to self". Do not include quotations.

The image is already aligned with relative directions, so left means left on the image. In your note to self, use the cardinal directions in the map.

Also ignore the numbers above each landmark as they will be updated.

Conversation:
{conversation_history}
"""


def fill(template: str, **values) -> str:
    """Substitute ``{name}`` placeholders; icon placeholders are always filled."""
    out = template
    for key, val in {**ICONS, **values}.items():
        out = out.replace("{" + key + "}", str(val))
    return out
