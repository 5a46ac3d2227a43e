"""Bounded max metrics: timeout and retries on the client, token cap on the call."""

from openai import OpenAI

prompt = "Explain recursion with an example."

client = OpenAI(timeout=20, max_retries=3)
response = client.responses.create(
    model="gpt-4o-2024-11-20",
    instructions="You are a concise computer science tutor.",
    input=prompt,
    max_output_tokens=256,
    temperature=0.2,
)
print(response.output_text)
