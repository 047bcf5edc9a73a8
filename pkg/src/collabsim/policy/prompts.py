"""Turn a robot's observation into a system/user prompt pair.

The system text depends only on the robot, so it is identical at every step.
The user text is rebuilt each turn in a fixed section order.
"""

from __future__ import annotations

from collabsim import ROBOT_ORDER
from collabsim.comms import render_message
from collabsim.memory import MemoryBuffer, render_memory
from collabsim.policy.base import PromptBundle
from collabsim.scenegraph import SceneGraph, render
from collabsim.tasks import describe
from collabsim.world.actions import LEGAL_ACTIONS, Move, Navigate, Open, Pick, Place, SendMessage, Wait
from collabsim.world.state import Robot

ROLE_TEXT = {
    "mobile": "a mobile robot. You can navigate and move your base but you have no arm",
    "manipulation": "a fixed manipulation robot at the work table. You cannot move your base; you pick and place objects within your reach",
    "mobile_manipulation": "a mobile manipulation robot. You can navigate, move your base, open furniture, and pick and place objects",
}

ACTION_SYNTAX = {
    Navigate: "navigate(<furniture>, <k>) - drive to nav target k of a furniture item",
    Move: "move(<dx>, <dy>) - shift the base by dx, dy meters along the map x and y axes",
    Open: "open(<furniture>) - open a closed container such as a fridge or cabinet",
    Pick: "pick(<object>) - grasp an object within reach",
    Place: "place(<object>, <destination>) - put the held object on a furniture item or tabletop zone",
    Wait: "wait() - do nothing this step",
    SendMessage: "send(<robot>, <payload>) - message a teammate",
}

PAYLOAD_SYNTAX = (
    "explore_request: <object>, <object>, ...",
    "transport_request: <object>; <context>",
    "delegated_explore: <furniture>, <furniture>, ...",
    "location_report: <object>; <furniture>; <x>; <y>",
    "task_status: <text>",
    "<any other text>",
)

PROTOCOL_TEXT = (
    "Collaboration protocol: bob asks alice to explore for missing task objects and to transport "
    "objects that lie on the work table beyond its reach. alice may delegate exploration of furniture "
    "to david. david reports the locations of objects it finds back to alice. Only bob performs the "
    "final tabletop placements into trays, panels and cutting boards."
)

FORMAT_TEXT = (
    "Respond with your reasoning after 'Thought:' and then exactly one action in a fenced block:\n"
    "```action\n<one action>\n```"
)


def legal_action_lines(role: str) -> list[str]:
    return [f"- {ACTION_SYNTAX[a]}" for a in LEGAL_ACTIONS[role]]


def system_prompt(robot: Robot) -> str:
    teammates = " and ".join(r for r in ROBOT_ORDER if r != robot.id)
    lines = [
        f"You are {robot.id}, {ROLE_TEXT[robot.role]}.",
        f"You work with {teammates} in a household environment to finish a shared tabletop task.",
        PROTOCOL_TEXT,
        "At every step you choose one atomic action. After it runs you receive textual feedback; "
        "use it, together with your history, to replan.",
        "Your actions:",
        *legal_action_lines(robot.role),
        "Message payload forms:",
        *(f"- {p}" for p in PAYLOAD_SYNTAX),
    ]
    if robot.role == "mobile_manipulation":
        lines.append(
            "Grasping tip: navigate to the nav target closest to the object first; if a pick fails "
            "because the object is too far, use move with the reported dx and dy to refine your base position."
        )
    lines.append(FORMAT_TEXT)
    return "\n".join(lines)


def robot_status(robot: Robot) -> str:
    parts = [f"Robot status: {robot.id} ({robot.role.replace('_', ' ')})"]
    if robot.mobile:
        p = robot.base_pose
        parts.append(f"base pose ({p.x:.2f}, {p.y:.2f}, {p.theta:.2f})")
    if robot.can_manipulate:
        parts.append("gripper closed, holding " + robot.gripper if robot.gripper else "gripper open and empty")
        parts.append(f"maximum grasping range {robot.reach_radius:.2f} m")
    return "; ".join(parts) + "."


def serialize_observation(
    robot: Robot,
    scene_graph: SceneGraph,
    drained_messages: list,
    memory: MemoryBuffer,
    task,
    *,
    step: int = 0,
    no_feedback: bool = False,
    no_history: bool = False,
) -> PromptBundle:
    if drained_messages:
        new_msgs = "\n".join(f"- {render_message(m)}" for m in drained_messages)
    else:
        new_msgs = "- (no new messages)"
    sections = [
        f"Step {step}.",
        "Task: " + describe(task),
        "Scene graph:\n" + render(scene_graph),
        robot_status(robot),
        "New messages:\n" + new_msgs,
        "Memory:\n" + render_memory(memory, latest_only=no_history, include_feedback=not no_feedback),
        "Legal actions:\n" + "\n".join(legal_action_lines(robot.role)),
        FORMAT_TEXT,
    ]
    return PromptBundle(system_prompt(robot), "\n\n".join(sections))
